#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "minipta/solver.hpp"

namespace minipta {

// ---------------------------------------------------------------------------
// Storage plugin — AppStorage / LocalStorage cross-component data flow
// ---------------------------------------------------------------------------
//
// Every (store instance, key) pair gets one abstract cell object whose
// "value" field holds the stored values. Decorated fields and link handles
// are wired bidirectionally into the cell; props only read from it. A
// dynamically keyed access conflates through a wildcard cell connected to
// every concrete cell of the same store.
class StoragePlugin final : public Plugin {
 public:
  std::string name() const override { return "storage"; }
  int priority() const override { return 10; }

  bool handleDynamicCall(Solver& sv, const PendingCall& pc) override {
    const IRStatement& s = *pc.stmt;

    // decorator registration calls injected into constructors
    if (s.base == "this" && (s.name == "__storageLink" || s.name == "__storageProp")) {
      handleRegistration(sv, pc, s.name == "__storageLink");
      return true;
    }

    if (!isApiName(s.name)) return false;

    if (s.baseIsGlobal && s.base == "AppStorage") {
      handleStoreCall(sv, pc, "AppStorage");
      sv.addCgEdge(pc, "storage::AppStorage." + s.name);
      return true;
    }

    if (!s.baseIsGlobal && !s.base.empty()) {
      // local-store instances and link/prop handles, found via the receiver
      NodeId recv = sv.receiverNode(pc);
      const auto& set = sv.pag().pts(recv);
      std::vector<ObjId> objs(set.begin(), set.end());
      bool claimed = false;
      for (ObjId oid : objs) {
        const HeapObject& o = sv.pag().object(oid);
        if (o.kind == ObjKind::ClassInstance && o.typeName == "LocalStorage") {
          handleStoreCall(sv, pc, o.key);
          sv.addCgEdge(pc, "storage::LocalStorage." + s.name);
          claimed = true;
        } else if (o.kind == ObjKind::StorageCell && o.key.rfind("handle@", 0) == 0 &&
                   (s.name == "set" || s.name == "get")) {
          NodeId value = sv.pag().nodeForField(oid, "value");
          if (s.name == "set") {
            if (auto v = sv.argNode(pc, 0)) sv.copyEdge(*v, value, EdgeLabel::Copy);
          } else if (auto l = sv.lhsNode(pc)) {
            sv.copyEdge(value, *l, EdgeLabel::Copy);
          }
          sv.addCgEdge(pc, "storage::handle." + s.name);
          claimed = true;
        }
      }
      return claimed;
    }
    return false;
  }

 private:
  std::map<std::string, std::set<ObjId>> cells_;    // store instance -> cells
  std::map<std::string, ObjId> wildcard_;           // store instance -> wildcard cell

  // Store API method; the decorators' Link/Prop spelling is accepted too.
  static std::string apiName(const std::string& n) {
    static const std::map<std::string, std::string> api{
        {"setOrCreate", "setOrCreate"}, {"set", "set"},
        {"get", "get"},                 {"link", "link"},
        {"Link", "link"},               {"prop", "prop"},
        {"Prop", "prop"},               {"setAndLink", "setAndLink"},
        {"SetAndLink", "setAndLink"},   {"setAndProp", "setAndProp"},
        {"SetAndProp", "setAndProp"}};
    auto it = api.find(n);
    return it == api.end() ? "" : it->second;
  }
  static bool isApiName(const std::string& n) { return !apiName(n).empty(); }

  NodeId cellValue(Solver& sv, const std::string& instance, const std::string& key,
                   const SourceLoc& loc) {
    ObjId cell = sv.pag().getOrCreateObject("cell:" + instance + ":" + key,
                                            ObjKind::StorageCell, instance + "." + key, -1, loc);
    if (cells_[instance].insert(cell).second) {
      auto w = wildcard_.find(instance);
      if (w != wildcard_.end()) connect(sv, w->second, cell);
    }
    return sv.pag().nodeForField(cell, "value");
  }

  NodeId wildcardValue(Solver& sv, const std::string& instance, const SourceLoc& loc) {
    ObjId wc = sv.pag().getOrCreateObject("cell:" + instance + ":*", ObjKind::StorageCell,
                                          instance + ".*", -1, loc);
    if (!wildcard_.count(instance)) {
      wildcard_[instance] = wc;
      for (ObjId cell : cells_[instance]) connect(sv, wc, cell);
    }
    return sv.pag().nodeForField(wc, "value");
  }

  void connect(Solver& sv, ObjId wc, ObjId cell) {
    NodeId w = sv.pag().nodeForField(wc, "value");
    NodeId c = sv.pag().nodeForField(cell, "value");
    sv.copyEdge(w, c, EdgeLabel::StorageBackflow);
    sv.copyEdge(c, w, EdgeLabel::StorageBackflow);
  }

  // Resolves the key argument at `idx`; a non-literal key selects the wildcard.
  NodeId keyedCell(Solver& sv, const PendingCall& pc, const std::string& instance,
                   std::size_t idx) {
    const IRStatement& s = *pc.stmt;
    if (idx < s.args.size() && s.args[idx].isString())
      return cellValue(sv, instance, s.args[idx].text, s.loc);
    return wildcardValue(sv, instance, s.loc);
  }

  void handleRegistration(Solver& sv, const PendingCall& pc, bool isLink) {
    const IRStatement& s = *pc.stmt;
    if (s.args.size() < 2 || !s.args[0].isString() || !s.args[1].isString()) return;
    const std::string& key = s.args[0].text;
    const std::string& fieldName = s.args[1].text;
    NodeId cell = cellValue(sv, "AppStorage", key, s.loc);

    NodeId thisNode = sv.receiverNode(pc);
    const auto& set = sv.pag().pts(thisNode);
    std::vector<ObjId> objs(set.begin(), set.end());
    for (ObjId oid : objs) {
      const HeapObject& o = sv.pag().object(oid);
      if (o.kind != ObjKind::ClassInstance && o.kind != ObjKind::StructInstance) continue;
      NodeId field = sv.pag().nodeForField(oid, fieldName);
      sv.copyEdge(cell, field, EdgeLabel::Copy);
      if (isLink) sv.copyEdge(field, cell, EdgeLabel::StorageBackflow);
    }
  }

  void handleStoreCall(Solver& sv, const PendingCall& pc, const std::string& instance) {
    const IRStatement& s = *pc.stmt;
    const std::string name = apiName(s.name);
    if (name == "setOrCreate" || name == "set") {
      NodeId cell = keyedCell(sv, pc, instance, 0);
      if (auto v = sv.argNode(pc, 1)) sv.copyEdge(*v, cell, EdgeLabel::Copy);
      return;
    }
    if (name == "get") {
      NodeId cell = keyedCell(sv, pc, instance, 0);
      if (auto l = sv.lhsNode(pc)) sv.copyEdge(cell, *l, EdgeLabel::Copy);
      return;
    }
    // link / prop and their set-and variants return a handle object
    bool isLink = name == "link" || name == "setAndLink";
    NodeId cell = keyedCell(sv, pc, instance, 0);
    ObjId handle = sv.pag().getOrCreateObject(
        "handle@" + std::to_string(s.id), ObjKind::StorageCell,
        std::string(isLink ? "storage-link" : "storage-prop"), s.id, s.loc);
    NodeId value = sv.pag().nodeForField(handle, "value");
    sv.copyEdge(cell, value, EdgeLabel::Copy);
    if (isLink) sv.copyEdge(value, cell, EdgeLabel::StorageBackflow);
    if (name == "setAndLink" || name == "setAndProp") {
      if (auto v = sv.argNode(pc, 1)) {
        sv.copyEdge(*v, value, EdgeLabel::Copy);
        if (isLink) sv.copyEdge(*v, cell, EdgeLabel::Copy);
      }
    }
    if (auto l = sv.lhsNode(pc)) sv.addPointsTo(*l, handle);
  }
};

// ---------------------------------------------------------------------------
// Function plugin — bind / call / apply on function objects
// ---------------------------------------------------------------------------
//
// `bind` clones the function object per (call site, source object); the
// clone carries its bound receiver and leading arguments as dedicated field
// pointers. Rebinding an already-bound clone keeps the original receiver
// (first bind wins) and appends arguments. `call` invokes immediately with
// an explicit receiver; `apply` does the same and spreads the elements of
// its array argument over all remaining parameters.
class FunctionPlugin final : public Plugin {
 public:
  std::string name() const override { return "function"; }
  int priority() const override { return 20; }

  bool handleDynamicCall(Solver& sv, const PendingCall& pc) override {
    const IRStatement& s = *pc.stmt;
    if (s.name != "bind" && s.name != "call" && s.name != "apply") return false;
    if (s.baseIsGlobal || s.base.empty()) return false;

    NodeId recv = sv.receiverNode(pc);
    const auto& set = sv.pag().pts(recv);
    std::vector<ObjId> fns;
    for (ObjId oid : set)
      if (sv.pag().object(oid).kind == ObjKind::FunctionObject) fns.push_back(oid);
    if (fns.empty()) return false;

    for (ObjId fn : fns) {
      if (s.name == "bind") handleBind(sv, pc, fn);
      else if (s.name == "call") handleCall(sv, pc, fn);
      else handleApply(sv, pc, fn);
    }
    return true;
  }

 private:
  void handleBind(Solver& sv, const PendingCall& pc, ObjId src) {
    const IRStatement& s = *pc.stmt;
    const HeapObject srcObj = sv.pag().object(src);  // copy: registry may reallocate
    ObjId clone = sv.pag().getOrCreateObject(
        "clone@" + std::to_string(s.id) + "(" + srcObj.key + ")", ObjKind::FunctionObject,
        "Function", s.id, s.loc, kEmptyCtx, srcObj.funcRef);

    HeapObject& c = sv.pag().object(clone);
    c.capturedThis.insert(srcObj.capturedThis.begin(), srcObj.capturedThis.end());
    if (srcObj.boundThis) {
      c.boundThis = srcObj.boundThis;  // first bind wins
    } else if (!s.args.empty() && s.args[0].isLocal()) {
      NodeId bt = sv.pag().nodeForField(clone, "__boundThis");
      c.boundThis = bt;
      sv.copyEdge(*sv.argNode(pc, 0), bt, EdgeLabel::ThisBinding);
    }

    std::vector<NodeId> bound = srcObj.boundArgs;
    for (std::size_t i = 1; i < s.args.size(); ++i) {
      NodeId slot =
          sv.pag().nodeForField(clone, "__bound" + std::to_string(bound.size()));
      if (auto a = sv.argNode(pc, i)) sv.copyEdge(*a, slot, EdgeLabel::ParamBinding);
      bound.push_back(slot);
    }
    sv.pag().object(clone).boundArgs = std::move(bound);

    if (auto l = sv.lhsNode(pc)) sv.addPointsTo(*l, clone);
  }

  void handleCall(Solver& sv, const PendingCall& pc, ObjId fn) {
    std::vector<std::optional<NodeId>> args;
    for (std::size_t i = 1; i < pc.stmt->args.size(); ++i) args.push_back(sv.argNode(pc, i));
    sv.invokeFunctionObject(pc, fn, sv.argNode(pc, 0), &args);
  }

  void handleApply(Solver& sv, const PendingCall& pc, ObjId fn) {
    std::vector<std::optional<NodeId>> noArgs;
    auto invoked = sv.invokeFunctionObject(pc, fn, sv.argNode(pc, 0), &noArgs);
    if (!invoked) return;
    auto [targetId, calleeCtx] = *invoked;
    auto arr = sv.argNode(pc, 1);
    if (!arr) return;
    // spread: the array's elements may land in any remaining parameter
    const MethodDecl& target = sv.program().methods[targetId];
    std::size_t firstFree = sv.pag().object(fn).boundArgs.size();
    const auto& arrSet = sv.pag().pts(*arr);
    std::vector<ObjId> arrObjs(arrSet.begin(), arrSet.end());
    for (ObjId ao : arrObjs) {
      NodeId elem = sv.pag().nodeForField(ao, "elem");
      for (std::size_t pi = firstFree; pi < target.params.size(); ++pi)
        sv.copyEdge(elem, sv.pag().nodeForVar(target.params[pi].name, targetId, calleeCtx),
                    EdgeLabel::ParamBinding);
    }
  }
};

// ---------------------------------------------------------------------------
// SDK plugin — stub objects for calls into platform APIs
// ---------------------------------------------------------------------------

struct SdkDecl {
  std::string qualifiedName;
  std::vector<std::string> paramTypes;
  std::string returnType;
};

struct SdkDecls {
  std::map<std::string, SdkDecl> byName;

  // Global symbols the frontend should accept as call bases.
  std::set<std::string> globalSymbols() const {
    std::set<std::string> out;
    for (const auto& [n, d] : byName) {
      auto dot = n.find('.');
      out.insert(dot == std::string::npos ? n : n.substr(0, dot));
    }
    return out;
  }
};

// Declaration file: one `Qualified.name(paramType, ...) -> ReturnType` per
// line; blank lines and `#` comments are skipped.
inline SdkDecls parse_sdk_decls(const std::string& text, const std::string& path,
                                DiagnosticSink& diags) {
  SdkDecls out;
  static const std::regex lineRe(
      R"(^\s*([A-Za-z_][A-Za-z0-9_.]*)\s*\(([^)]*)\)\s*->\s*([A-Za-z_][A-Za-z0-9_.]*)\s*$)");
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::string trimmed = line.substr(0, line.find('#'));
    if (trimmed.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(trimmed, m, lineRe)) {
      diags.warn({path, lineNo, 1}, "malformed SDK declaration: " + line);
      continue;
    }
    SdkDecl d;
    d.qualifiedName = m[1];
    d.returnType = m[3];
    std::istringstream ps(m[2]);
    std::string p;
    while (std::getline(ps, p, ',')) {
      auto b = p.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      d.paramTypes.push_back(p.substr(b, p.find_last_not_of(" \t") - b + 1));
    }
    if (out.byName.count(d.qualifiedName))
      diags.warn({path, lineNo, 1}, "duplicate SDK declaration '" + d.qualifiedName + "'");
    out.byName[d.qualifiedName] = std::move(d);
  }
  return out;
}

inline SdkDecls load_sdk_decls(const std::string& path, DiagnosticSink& diags) {
  std::ifstream in(path);
  if (!in)
    throw AnalysisError({Severity::Error, {path, 0, 0}, "cannot open SDK declaration file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sdk_decls(ss.str(), path, diags);
}

// Declared SDK calls produce one stub heap object per call site; arguments
// are retained in the stub's "captured" field, and non-primitive return
// types flow the stub into the result. Member calls on stubs chain through
// the stub's declared type.
class SdkPlugin final : public Plugin {
 public:
  explicit SdkPlugin(SdkDecls decls) : decls_(std::move(decls)) {}

  std::string name() const override { return "sdk"; }
  int priority() const override { return 30; }

  bool handleDynamicCall(Solver& sv, const PendingCall& pc) override {
    const IRStatement& s = *pc.stmt;
    if (s.baseIsGlobal) {
      std::string sym = s.base.empty() ? s.name : s.base + "." + s.name;
      const SdkDecl* d = lookup(sym);
      if (!d) return false;
      applyDecl(sv, pc, *d);
      return true;
    }
    if (s.base.empty()) return false;

    NodeId recv = sv.receiverNode(pc);
    const auto& set = sv.pag().pts(recv);
    std::vector<ObjId> objs(set.begin(), set.end());
    bool claimed = false;
    for (ObjId oid : objs) {
      const HeapObject& o = sv.pag().object(oid);
      if (o.kind != ObjKind::SdkStub) continue;
      if (const SdkDecl* d = lookup(o.typeName + "." + s.name)) {
        applyDecl(sv, pc, *d);
        claimed = true;
      }
    }
    return claimed;
  }

 private:
  SdkDecls decls_;

  const SdkDecl* lookup(const std::string& n) const {
    auto it = decls_.byName.find(n);
    return it == decls_.byName.end() ? nullptr : &it->second;
  }

  static bool isPrimitive(const std::string& t) {
    return t.empty() || t == "number" || t == "string" || t == "boolean" || t == "void";
  }

  void applyDecl(Solver& sv, const PendingCall& pc, const SdkDecl& d) {
    const IRStatement& s = *pc.stmt;
    ObjId stub = sv.pag().getOrCreateObject(
        "stub@" + std::to_string(s.id), ObjKind::SdkStub,
        isPrimitive(d.returnType) ? "void" : d.returnType, s.id, s.loc);
    NodeId captured = sv.pag().nodeForField(stub, "captured");
    for (std::size_t i = 0; i < s.args.size(); ++i)
      if (auto a = sv.argNode(pc, i)) sv.copyEdge(*a, captured, EdgeLabel::Copy);
    if (!isPrimitive(d.returnType))
      if (auto l = sv.lhsNode(pc)) sv.addPointsTo(*l, stub);
    sv.addCgEdge(pc, "sdk::" + d.qualifiedName);
  }
};

// ---------------------------------------------------------------------------

inline std::vector<std::unique_ptr<Plugin>> make_default_plugins(
    const std::set<std::string>& disabled = {}, std::optional<SdkDecls> sdk = std::nullopt) {
  std::vector<std::unique_ptr<Plugin>> out;
  if (!disabled.count("storage")) out.push_back(std::make_unique<StoragePlugin>());
  if (!disabled.count("function")) out.push_back(std::make_unique<FunctionPlugin>());
  if (!disabled.count("sdk") && sdk) out.push_back(std::make_unique<SdkPlugin>(std::move(*sdk)));
  return out;
}

}  // namespace minipta
