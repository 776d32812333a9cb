#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "minipta/ast.hpp"

namespace minipta {

// ---------------------------------------------------------------------------
// Three-address IR
// ---------------------------------------------------------------------------

enum class IrKind {
  AllocObject,          // lhs = new typeName(args)
  AllocFunction,        // lhs = <function typeName>
  Assign,               // lhs = value
  FieldStore,           // base.name = value
  FieldLoad,            // lhs = base.name
  StaticCall,           // lhs = name(args)             name: qualified callee
  DynamicCall,          // lhs = base.name(args)
  FunctionPointerCall,  // lhs = base(args)
  Return,               // return value
};

inline const char* irKindName(IrKind k) {
  switch (k) {
    case IrKind::AllocObject: return "AllocObject";
    case IrKind::AllocFunction: return "AllocFunction";
    case IrKind::Assign: return "Assign";
    case IrKind::FieldStore: return "FieldStore";
    case IrKind::FieldLoad: return "FieldLoad";
    case IrKind::StaticCall: return "StaticCall";
    case IrKind::DynamicCall: return "DynamicCall";
    case IrKind::FunctionPointerCall: return "FunctionPointerCall";
    case IrKind::Return: return "Return";
  }
  return "?";
}

struct Operand {
  enum Kind { None, Local, StringLit, NumberLit, BoolLit, NullLit };
  Kind kind = None;
  std::string text;

  bool isLocal() const { return kind == Local; }
  bool isString() const { return kind == StringLit; }
  bool operator==(const Operand&) const = default;

  static Operand local(std::string n) { return {Local, std::move(n)}; }
  static Operand none() { return {}; }
};

struct IRStatement {
  int id = -1;
  SourceLoc loc;
  IrKind kind = IrKind::Assign;

  std::string lhs;           // destination local, empty for value-discarding calls
  std::string base;          // receiver local / callee local / store-load base
  bool baseIsGlobal = false; // base names a global symbol (AppStorage, SDK module, ...)
  std::string name;          // field name or method name (DynamicCall), callee (StaticCall)
  std::string typeName;      // AllocObject class, AllocFunction target method qualified name
  Operand value;             // Assign rhs / FieldStore value / Return value
  std::vector<Operand> args; // call and constructor arguments
};

// The analysis-level operation patterns; Return rides along as the call rule's
// return-value propagation.
enum class OperationPattern {
  AllocCreateObject,
  AllocCreateFunctionPointer,
  Assign,
  Store,
  Load,
  CallStatic,
  CallDynamic,
  CallFunctionPointer,
  Return,
};

inline const char* patternName(OperationPattern p) {
  switch (p) {
    case OperationPattern::AllocCreateObject: return "alloc/create-object";
    case OperationPattern::AllocCreateFunctionPointer: return "alloc/create-function-pointer";
    case OperationPattern::Assign: return "assign";
    case OperationPattern::Store: return "store";
    case OperationPattern::Load: return "load";
    case OperationPattern::CallStatic: return "call/static";
    case OperationPattern::CallDynamic: return "call/dynamic";
    case OperationPattern::CallFunctionPointer: return "call/function-pointer";
    case OperationPattern::Return: return "return";
  }
  return "?";
}

// [OP] classify_statement — total over desugared statements.
inline OperationPattern classify_statement(const IRStatement& s) {
  switch (s.kind) {
    case IrKind::AllocObject: return OperationPattern::AllocCreateObject;
    case IrKind::AllocFunction: return OperationPattern::AllocCreateFunctionPointer;
    case IrKind::Assign: return OperationPattern::Assign;
    case IrKind::FieldStore: return OperationPattern::Store;
    case IrKind::FieldLoad: return OperationPattern::Load;
    case IrKind::StaticCall: return OperationPattern::CallStatic;
    case IrKind::DynamicCall: return OperationPattern::CallDynamic;
    case IrKind::FunctionPointerCall: return OperationPattern::CallFunctionPointer;
    case IrKind::Return: return OperationPattern::Return;
  }
  return OperationPattern::Assign;
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct MethodDecl {
  std::string qualifiedName;  // Namespace.Class.method, Class.method or free name
  std::string name;
  std::string owner;          // owning class qualified name, empty for free functions
  bool isStatic = false;
  bool isConstructor = false;
  bool isAnonymous = false;
  std::string lexicalParent;  // for anonymous methods: qualified name of the enclosing method
  std::vector<Param> params;
  TypeRef returnType;
  SourceLoc loc;
  std::vector<IRStatement> body;
  std::map<std::string, TypeRef> localTypes;  // declared types of params/locals/temps

  TypeRef typeOfLocal(const std::string& local) const {
    auto it = localTypes.find(local);
    return it == localTypes.end() ? TypeRef{} : it->second;
  }
};

enum class StorageBinding { None, Prop, Link };

struct FieldDecl {
  std::string name;
  TypeRef type;
  StorageBinding storage = StorageBinding::None;
  std::string storageKey;
  SourceLoc loc;
};

struct ClassDecl {
  std::string name;           // simple name; classes are globally unique in the flat namespace
  std::string superclass;     // empty when none
  bool isStruct = false;
  bool isComponent = false;   // @Component
  bool isEntry = false;       // @Entry
  std::vector<FieldDecl> fields;
  std::vector<std::string> methods;  // qualified names, declaration order
  SourceLoc loc;

  const FieldDecl* field(const std::string& n) const {
    for (const auto& f : fields)
      if (f.name == n) return &f;
    return nullptr;
  }
  bool hasStorageBindings() const {
    for (const auto& f : fields)
      if (f.storage != StorageBinding::None) return true;
    return false;
  }
};

// ---------------------------------------------------------------------------
// Whole program
// ---------------------------------------------------------------------------

struct IRProgram {
  std::vector<std::string> modulePaths;
  std::vector<ClassDecl> classes;
  // deque: hoisting anonymous methods appends while bodies are being lowered,
  // and references into this container must stay valid
  std::deque<MethodDecl> methods;
  int nextStatementId = 0;

  std::map<std::string, int> classIndex;   // simple name -> index
  std::map<std::string, int> methodIndex;  // qualified name -> index

  void reindex() {
    classIndex.clear();
    methodIndex.clear();
    for (std::size_t i = 0; i < classes.size(); ++i) classIndex[classes[i].name] = (int)i;
    for (std::size_t i = 0; i < methods.size(); ++i)
      methodIndex[methods[i].qualifiedName] = (int)i;
  }

  const ClassDecl* findClass(const std::string& name) const {
    auto it = classIndex.find(name);
    return it == classIndex.end() ? nullptr : &classes[it->second];
  }
  const MethodDecl* findMethod(const std::string& qualifiedName) const {
    auto it = methodIndex.find(qualifiedName);
    return it == methodIndex.end() ? nullptr : &methods[it->second];
  }
  int methodId(const std::string& qualifiedName) const {
    auto it = methodIndex.find(qualifiedName);
    return it == methodIndex.end() ? -1 : it->second;
  }

  // [OP] dispatch — VMT lookup walking the superclass chain.
  const MethodDecl* dispatch(const std::string& className, const std::string& methodName) const {
    const ClassDecl* c = findClass(className);
    while (c) {
      const MethodDecl* m = findMethod(c->name + "." + methodName);
      if (m) return m;
      c = c->superclass.empty() ? nullptr : findClass(c->superclass);
    }
    return nullptr;
  }

  // All classes in the cone of `root` (root itself plus transitive subclasses).
  std::vector<std::string> cone(const std::string& root) const {
    std::vector<std::string> out;
    for (const auto& c : classes) {
      const ClassDecl* p = &c;
      while (p) {
        if (p->name == root) {
          out.push_back(c.name);
          break;
        }
        p = p->superclass.empty() ? nullptr : findClass(p->superclass);
      }
    }
    return out;
  }

  const IRStatement* findStatement(int id) const {
    for (const auto& m : methods)
      for (const auto& s : m.body)
        if (s.id == id) return &s;
    return nullptr;
  }
  const MethodDecl* methodOfStatement(int id) const {
    for (const auto& m : methods)
      for (const auto& s : m.body)
        if (s.id == id) return &m;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// JSON IR serialization — stable, documented schema (`ir dump`)
// ---------------------------------------------------------------------------

namespace irjson {

using nlohmann::json;

inline json operandToJson(const Operand& o) {
  static const char* names[] = {"none", "local", "string", "number", "bool", "null"};
  return json{{"k", names[o.kind]}, {"text", o.text}};
}

inline Operand operandFromJson(const json& j) {
  Operand o;
  std::string k = j.at("k");
  if (k == "local") o.kind = Operand::Local;
  else if (k == "string") o.kind = Operand::StringLit;
  else if (k == "number") o.kind = Operand::NumberLit;
  else if (k == "bool") o.kind = Operand::BoolLit;
  else if (k == "null") o.kind = Operand::NullLit;
  else o.kind = Operand::None;
  o.text = j.at("text");
  return o;
}

inline json locToJson(const SourceLoc& l) {
  return json{{"file", l.file}, {"line", l.line}, {"col", l.column}};
}
inline SourceLoc locFromJson(const json& j) {
  return {j.at("file"), j.at("line"), j.at("col")};
}

inline json stmtToJson(const IRStatement& s) {
  json args = json::array();
  for (const auto& a : s.args) args.push_back(operandToJson(a));
  return json{{"id", s.id},
              {"kind", irKindName(s.kind)},
              {"loc", locToJson(s.loc)},
              {"operands",
               {{"lhs", s.lhs},
                {"base", s.base},
                {"base_is_global", s.baseIsGlobal},
                {"name", s.name},
                {"type", s.typeName},
                {"value", operandToJson(s.value)},
                {"args", args}}}};
}

inline IRStatement stmtFromJson(const json& j) {
  IRStatement s;
  s.id = j.at("id");
  std::string k = j.at("kind");
  bool found = false;
  for (int i = 0; i <= (int)IrKind::Return; ++i) {
    if (k == irKindName((IrKind)i)) {
      s.kind = (IrKind)i;
      found = true;
      break;
    }
  }
  if (!found)
    throw AnalysisError({Severity::Error, {}, "unknown IR statement kind '" + k + "'"});
  s.loc = locFromJson(j.at("loc"));
  const json& op = j.at("operands");
  s.lhs = op.at("lhs");
  s.base = op.at("base");
  s.baseIsGlobal = op.at("base_is_global");
  s.name = op.at("name");
  s.typeName = op.at("type");
  s.value = operandFromJson(op.at("value"));
  for (const auto& a : op.at("args")) s.args.push_back(operandFromJson(a));
  return s;
}

inline json typeToJson(const TypeRef& t) {
  json j = json::array();
  for (const auto& m : t.members) j.push_back(m);
  return j;
}
inline TypeRef typeFromJson(const json& j) {
  TypeRef t;
  for (const auto& m : j) t.members.push_back(m);
  return t;
}

inline json programToJson(const IRProgram& p) {
  json classes = json::array();
  for (const auto& c : p.classes) {
    json fields = json::array();
    for (const auto& f : c.fields) {
      static const char* storageNames[] = {"none", "prop", "link"};
      fields.push_back({{"name", f.name},
                        {"type", typeToJson(f.type)},
                        {"storage", storageNames[(int)f.storage]},
                        {"key", f.storageKey}});
    }
    classes.push_back({{"name", c.name},
                       {"superclass", c.superclass},
                       {"is_struct", c.isStruct},
                       {"is_component", c.isComponent},
                       {"is_entry", c.isEntry},
                       {"fields", fields},
                       {"methods", c.methods}});
  }
  json methods = json::array();
  for (const auto& m : p.methods) {
    json params = json::array();
    for (const auto& pr : m.params)
      params.push_back({{"name", pr.name}, {"type", typeToJson(pr.type)}});
    json locals = json::object();
    for (const auto& [n, t] : m.localTypes) locals[n] = typeToJson(t);
    json stmts = json::array();
    for (const auto& s : m.body) stmts.push_back(stmtToJson(s));
    methods.push_back({{"qualified_name", m.qualifiedName},
                       {"name", m.name},
                       {"owner", m.owner},
                       {"is_static", m.isStatic},
                       {"is_constructor", m.isConstructor},
                       {"is_anonymous", m.isAnonymous},
                       {"lexical_parent", m.lexicalParent},
                       {"return_type", typeToJson(m.returnType)},
                       {"params", params},
                       {"loc", locToJson(m.loc)},
                       {"local_types", locals},
                       {"statements", stmts}});
  }
  return json{{"version", 1},
              {"module_paths", p.modulePaths},
              {"next_statement_id", p.nextStatementId},
              {"classes", classes},
              {"methods", methods}};
}

inline IRProgram programFromJson(const json& j) {
  IRProgram p;
  if (j.value("version", 0) != 1)
    throw AnalysisError({Severity::Error, {}, "unsupported IR JSON version"});
  for (const auto& m : j.at("module_paths")) p.modulePaths.push_back(m);
  p.nextStatementId = j.at("next_statement_id");
  for (const auto& jc : j.at("classes")) {
    ClassDecl c;
    c.name = jc.at("name");
    c.superclass = jc.at("superclass");
    c.isStruct = jc.at("is_struct");
    c.isComponent = jc.at("is_component");
    c.isEntry = jc.at("is_entry");
    for (const auto& jf : jc.at("fields")) {
      FieldDecl f;
      f.name = jf.at("name");
      f.type = typeFromJson(jf.at("type"));
      std::string st = jf.at("storage");
      f.storage = st == "prop" ? StorageBinding::Prop
                : st == "link" ? StorageBinding::Link
                               : StorageBinding::None;
      f.storageKey = jf.at("key");
      c.fields.push_back(std::move(f));
    }
    for (const auto& mn : jc.at("methods")) c.methods.push_back(mn);
    p.classes.push_back(std::move(c));
  }
  for (const auto& jm : j.at("methods")) {
    MethodDecl m;
    m.qualifiedName = jm.at("qualified_name");
    m.name = jm.at("name");
    m.owner = jm.at("owner");
    m.isStatic = jm.at("is_static");
    m.isConstructor = jm.at("is_constructor");
    m.isAnonymous = jm.at("is_anonymous");
    m.lexicalParent = jm.at("lexical_parent");
    m.returnType = typeFromJson(jm.at("return_type"));
    for (const auto& jp : jm.at("params"))
      m.params.push_back({jp.at("name"), typeFromJson(jp.at("type"))});
    m.loc = locFromJson(jm.at("loc"));
    for (const auto& [n, t] : jm.at("local_types").items()) m.localTypes[n] = typeFromJson(t);
    for (const auto& js : jm.at("statements")) m.body.push_back(stmtFromJson(js));
    p.methods.push_back(std::move(m));
  }
  p.reindex();
  return p;
}

}  // namespace irjson

}  // namespace minipta
