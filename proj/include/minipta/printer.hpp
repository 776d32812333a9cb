#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "minipta/ir.hpp"

namespace minipta {

// Pretty-prints the IR back to mini-ArkTS source. The output parses and
// re-desugars to a statement stream with the same classification multiset
// (lambda bodies were hoisted into named methods and are printed as such;
// synthetic storage registrations are omitted because the printed decorators
// regenerate them).
class IrPrinter {
 public:
  static std::string print(const IRProgram& p) {
    IrPrinter pr(p);
    return pr.run();
  }

 private:
  const IRProgram& prog_;
  std::ostringstream out_;
  explicit IrPrinter(const IRProgram& p) : prog_(p) {}

  static std::string operandStr(const Operand& o) {
    switch (o.kind) {
      case Operand::Local: return o.text;
      case Operand::StringLit: return "'" + o.text + "'";
      case Operand::NumberLit: return o.text;
      case Operand::BoolLit: return o.text;
      case Operand::NullLit: return "null";
      case Operand::None: return "null";
    }
    return "null";
  }

  std::string argsStr(const std::vector<Operand>& args) {
    std::string s = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) s += ", ";
      s += operandStr(args[i]);
    }
    return s + ")";
  }

  void printMethodBody(const MethodDecl& m, const std::string& indent) {
    std::set<std::string> declared{"this", "globalThis"};
    for (const auto& p : m.params) declared.insert(p.name);
    auto let = [&](const std::string& lhs) -> std::string {
      if (lhs.empty()) return "";
      if (declared.insert(lhs).second) {
        TypeRef t = m.typeOfLocal(lhs);
        // annotate so declared types survive the round trip
        return "let " + lhs + (t.empty() ? "" : ": " + t.str()) + " = ";
      }
      return lhs + " = ";
    };

    for (const auto& s : m.body) {
      if (s.kind == IrKind::DynamicCall && s.name.rfind("__storage", 0) == 0)
        continue;  // regenerated from the printed decorators
      out_ << indent;
      switch (s.kind) {
        case IrKind::AllocObject:
          out_ << let(s.lhs) << "new " << s.typeName << argsStr(s.args);
          break;
        case IrKind::AllocFunction: {
          const MethodDecl* target = prog_.findMethod(s.typeName);
          if (target && target->owner.empty() && !target->isAnonymous)
            out_ << let(s.lhs) << s.typeName;  // named function reference
          else
            out_ << let(s.lhs) << "() => {}";
          break;
        }
        case IrKind::Assign:
          out_ << let(s.lhs) << operandStr(s.value);
          break;
        case IrKind::FieldStore:
          out_ << s.base << "." << s.name << " = " << operandStr(s.value);
          break;
        case IrKind::FieldLoad:
          out_ << let(s.lhs) << s.base << "." << s.name;
          break;
        case IrKind::StaticCall:
          out_ << let(s.lhs) << s.name << argsStr(s.args);
          break;
        case IrKind::DynamicCall:
          if (s.baseIsGlobal && s.base.empty())
            out_ << let(s.lhs) << s.name << argsStr(s.args);
          else
            out_ << let(s.lhs) << (s.baseIsGlobal ? s.base : s.base) << "." << s.name
                 << argsStr(s.args);
          break;
        case IrKind::FunctionPointerCall:
          out_ << let(s.lhs) << s.base << argsStr(s.args);
          break;
        case IrKind::Return:
          out_ << "return";
          if (s.value.kind != Operand::None) out_ << " " << operandStr(s.value);
          break;
      }
      out_ << ";\n";
    }
  }

  void printSignature(const MethodDecl& m) {
    out_ << "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      if (i) out_ << ", ";
      out_ << m.params[i].name;
      if (!m.params[i].type.empty()) out_ << ": " << m.params[i].type.str();
    }
    out_ << ")";
    if (!m.returnType.empty()) out_ << ": " << m.returnType.str();
  }

  std::string run() {
    // free functions, grouped by namespace
    std::map<std::string, std::vector<const MethodDecl*>> byNs;
    for (const auto& m : prog_.methods) {
      if (!m.owner.empty() || m.qualifiedName == "DummyMain") continue;
      auto dot = m.qualifiedName.find('.');
      byNs[dot == std::string::npos ? "" : m.qualifiedName.substr(0, dot)].push_back(&m);
    }
    for (const auto& [ns, fns] : byNs) {
      std::string indent = ns.empty() ? "" : "  ";
      if (!ns.empty()) out_ << "namespace " << ns << " {\n";
      for (const MethodDecl* m : fns) {
        out_ << indent << "function " << m->name;
        printSignature(*m);
        out_ << " {\n";
        printMethodBody(*m, indent + "  ");
        out_ << indent << "}\n";
      }
      if (!ns.empty()) out_ << "}\n";
    }

    for (const auto& c : prog_.classes) {
      if (c.isEntry) out_ << "@Entry\n";
      if (c.isComponent) out_ << "@Component\n";
      out_ << (c.isStruct ? "struct " : "class ") << c.name;
      if (!c.superclass.empty()) out_ << " extends " << c.superclass;
      out_ << " {\n";
      for (const auto& f : c.fields) {
        out_ << "  ";
        if (f.storage == StorageBinding::Prop) out_ << "@StorageProp('" << f.storageKey << "') ";
        if (f.storage == StorageBinding::Link) out_ << "@StorageLink('" << f.storageKey << "') ";
        out_ << f.name;
        if (!f.type.empty()) out_ << ": " << f.type.str();
        out_ << ";\n";
      }
      for (const auto& qn : c.methods) {
        const MethodDecl* m = prog_.findMethod(qn);
        if (!m) continue;
        out_ << "  ";
        if (m->isConstructor)
          out_ << "constructor";
        else
          out_ << (m->isStatic ? "static " : "") << m->name;
        printSignature(*m);
        out_ << " {\n";
        printMethodBody(*m, "    ");
        out_ << "  }\n";
      }
      out_ << "}\n";
    }
    return out_.str();
  }
};

inline std::string print_ir(const IRProgram& p) { return IrPrinter::print(p); }

}  // namespace minipta
