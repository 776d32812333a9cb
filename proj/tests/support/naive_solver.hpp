#pragma once

// Exhaustive reference solver used as an oracle. It shares only the frontend
// (IR, declarations) with the engine under test; the analysis itself is a
// deliberately naive global re-evaluation: every round revisits every
// statement of every reachable (method, context) activation and recomputes
// full set unions until nothing changes anywhere. No worklists, no deltas,
// no pointer-assignment graph.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "minipta/context.hpp"
#include "minipta/ir.hpp"
#include "minipta/plugins.hpp"

namespace naive {

using minipta::ContextKind;
using minipta::ContextSelector;
using minipta::IRProgram;
using minipta::IRStatement;
using minipta::IrKind;
using minipta::MethodDecl;
using minipta::SdkDecl;
using minipta::SdkDecls;

using Ctx = std::vector<int>;
// (methodId, context, local). globalThis lives at methodId -1.
using VarKey = std::tuple<int, Ctx, std::string>;
// (object key, field name)
using FieldKey = std::pair<std::string, std::string>;
// (callsite stmt id, caller context, caller qualified name, target)
using CgEdge = std::tuple<int, Ctx, std::string, std::string>;

enum class NKind { Instance, Struct, Function, Stub, Cell };

struct NObject {
  NKind kind = NKind::Instance;
  std::string typeName;
  std::string funcRef;                       // Function objects
  std::optional<FieldKey> boundThis;         // Function objects (bound clones)
  std::vector<FieldKey> boundArgs;           // Function objects (bound clones)
  std::set<VarKey> capturedThis;             // Function objects (lexical this)
};

struct NaiveResult {
  std::map<VarKey, std::set<std::string>> varPts;
  std::map<FieldKey, std::set<std::string>> fieldPts;
  std::set<CgEdge> cg;
  std::map<std::string, NObject> objects;
  int rounds = 0;
};

class NaiveSolver {
 public:
  NaiveSolver(const IRProgram& prog, ContextSelector sel,
              std::set<std::string> disabledPlugins = {},
              std::optional<SdkDecls> sdk = std::nullopt)
      : prog_(prog), sel_(sel), disabled_(std::move(disabledPlugins)), sdk_(std::move(sdk)) {}

  NaiveResult run(const std::vector<std::string>& entries) {
    for (const auto& qn : entries) reachable_.insert({prog_.methodId(qn), {}});
    do {
      changed_ = false;
      ++r_.rounds;
      // snapshot: activations discovered mid-round are processed next round,
      // like the engine's outer loop
      std::set<std::pair<int, Ctx>> snapshot = reachable_;
      for (const auto& [m, ctx] : snapshot)
        for (const IRStatement& s : prog_.methods[m].body) transfer(m, ctx, s);
      // wildcard storage cells equalize with every concrete cell of the store
      for (const auto& [inst, cells] : storeCells_) {
        if (!storeWildcard_.count(inst)) continue;
        FieldKey wc{"cell:" + inst + ":*", "value"};
        for (const auto& cell : cells) {
          flowSet(fieldPtsOf(wc), fieldPtsRef({cell, "value"}));
          flowSet(fieldPtsOf({cell, "value"}), fieldPtsRef(wc));
        }
      }
      // link handles write back into their cell
      for (const auto& [handle, cell] : linkHandleCell_)
        flowSet(fieldPtsOf({handle, "value"}), fieldPtsRef(cell));
      if (r_.rounds > 10000) break;  // safety net; a correct run converges fast
    } while (changed_);
    return r_;
  }

 private:
  const IRProgram& prog_;
  ContextSelector sel_;
  std::set<std::string> disabled_;
  std::optional<SdkDecls> sdk_;

  NaiveResult r_;
  bool changed_ = false;
  std::set<std::pair<int, Ctx>> reachable_;
  std::map<std::string, std::set<std::string>> storeCells_;  // store -> concrete cell keys
  std::set<std::string> storeWildcard_;                      // stores with a wildcard cell
  std::map<std::string, FieldKey> linkHandleCell_;           // link handle -> cell value

  // --- set plumbing --------------------------------------------------------

  std::set<std::string>& varPtsRef(const VarKey& k) { return r_.varPts[k]; }
  std::set<std::string>& fieldPtsRef(const FieldKey& k) { return r_.fieldPts[k]; }
  std::set<std::string> varPtsOf(const VarKey& k) const {
    auto it = r_.varPts.find(k);
    return it == r_.varPts.end() ? std::set<std::string>{} : it->second;
  }
  std::set<std::string> fieldPtsOf(const FieldKey& k) const {
    auto it = r_.fieldPts.find(k);
    return it == r_.fieldPts.end() ? std::set<std::string>{} : it->second;
  }

  void flowSet(const std::set<std::string>& from, std::set<std::string>& to) {
    for (const auto& o : from)
      if (to.insert(o).second) changed_ = true;
  }
  void addObj(std::set<std::string>& to, const std::string& obj) {
    if (to.insert(obj).second) changed_ = true;
  }

  // A value source is either a variable or an object field.
  struct Src {
    bool isField = false;
    VarKey var;
    FieldKey field;
  };
  std::set<std::string> read(const Src& s) const {
    return s.isField ? fieldPtsOf(s.field) : varPtsOf(s.var);
  }
  static Src varSrc(VarKey k) { return {false, std::move(k), {}}; }
  static Src fieldSrc(FieldKey k) { return {true, {}, std::move(k)}; }

  VarKey var(int m, const Ctx& ctx, const std::string& local) {
    if (local == "globalThis") {
      VarKey g{-1, {}, "globalThis"};
      if (!r_.objects.count("global")) {
        r_.objects["global"] = {NKind::Instance, "globalThis", "", {}, {}, {}};
        addObj(varPtsRef(g), "global");
      }
      return g;
    }
    return {m, ctx, local};
  }

  std::optional<VarKey> argVar(int m, const Ctx& ctx, const IRStatement& s, std::size_t i) {
    if (i >= s.args.size() || !s.args[i].isLocal()) return std::nullopt;
    return var(m, ctx, s.args[i].text);
  }

  NObject& ensureObject(const std::string& key, NKind kind, const std::string& typeName,
                        const std::string& funcRef = "") {
    auto it = r_.objects.find(key);
    if (it == r_.objects.end()) {
      changed_ = true;
      it = r_.objects.emplace(key, NObject{kind, typeName, funcRef, {}, {}, {}}).first;
    }
    return it->second;
  }

  // --- contexts, reachability, call graph ----------------------------------

  Ctx calleeCtx(const IRStatement& s, const Ctx& callerCtx, int callerMethod) const {
    if (s.base == "globalThis" || s.baseIsGlobal) return {};
    if (sel_.kind == ContextKind::Insensitive || sel_.k == 0) return {};
    Ctx out{sel_.kind == ContextKind::CallsiteK ? s.id : callerMethod};
    for (int e : callerCtx) {
      if ((int)out.size() >= sel_.k) break;
      out.push_back(e);
    }
    return out;
  }

  void markReachable(int m, const Ctx& ctx) {
    if (reachable_.insert({m, ctx}).second) changed_ = true;
  }

  void cgEdge(int m, const Ctx& ctx, const IRStatement& s, const std::string& target) {
    if (r_.cg.insert({s.id, ctx, prog_.methods[m].qualifiedName, target}).second)
      changed_ = true;
  }

  std::vector<std::string> returnLocals(int methodId) const {
    std::vector<std::string> rv;
    for (const IRStatement& s : prog_.methods[methodId].body)
      if (s.kind == IrKind::Return && s.value.isLocal()) rv.push_back(s.value.text);
    return rv;
  }

  // Wires one resolved call: leading bound/explicit argument sources, then
  // (optionally) the statement's own arguments, then returns back to the lhs.
  void wire(int m, const Ctx& ctx, const IRStatement& s, int targetId, const Ctx& tctx,
            const std::vector<std::optional<Src>>& preArgs = {}, bool skipStmtArgs = false) {
    const MethodDecl& target = prog_.methods[targetId];
    std::size_t pi = 0;
    for (const auto& a : preArgs) {
      if (pi >= target.params.size()) break;
      if (a) flowSet(read(*a), varPtsRef(var(targetId, tctx, target.params[pi].name)));
      ++pi;
    }
    if (!skipStmtArgs) {
      for (std::size_t i = 0; i < s.args.size() && pi < target.params.size(); ++i, ++pi)
        if (auto a = argVar(m, ctx, s, i))
          flowSet(varPtsOf(*a), varPtsRef(var(targetId, tctx, target.params[pi].name)));
    }
    if (!s.lhs.empty())
      for (const std::string& rv : returnLocals(targetId))
        flowSet(varPtsOf(var(targetId, tctx, rv)), varPtsRef(var(m, ctx, s.lhs)));
    cgEdge(m, ctx, s, target.qualifiedName);
    markReachable(targetId, tctx);
  }

  // this-binding precedence: bound > explicit receiver > lexically captured.
  // Returns the callee activation when the function resolves.
  std::optional<std::pair<int, Ctx>> invokeFunction(
      int m, const Ctx& ctx, const IRStatement& s, const std::string& fnKey,
      std::optional<Src> explicitThis = std::nullopt,
      const std::vector<std::optional<Src>>* argsOverride = nullptr) {
    const NObject fn = r_.objects.at(fnKey);  // copy: map may grow below
    int targetId = prog_.methodId(fn.funcRef);
    if (targetId < 0) return std::nullopt;
    const MethodDecl& target = prog_.methods[targetId];
    Ctx tctx = calleeCtx(s, ctx, m);

    if (!target.owner.empty() && !target.isStatic) {
      auto& calleeThis = varPtsRef(var(targetId, tctx, "this"));
      if (fn.boundThis) flowSet(fieldPtsOf(*fn.boundThis), calleeThis);
      else if (explicitThis) flowSet(read(*explicitThis), calleeThis);
      else
        for (const VarKey& capt : fn.capturedThis) flowSet(varPtsOf(capt), calleeThis);
    }

    std::vector<std::optional<Src>> preArgs;
    for (const FieldKey& b : fn.boundArgs) preArgs.push_back(fieldSrc(b));
    if (argsOverride) {
      preArgs.insert(preArgs.end(), argsOverride->begin(), argsOverride->end());
      wire(m, ctx, s, targetId, tctx, preArgs, /*skipStmtArgs=*/true);
    } else {
      wire(m, ctx, s, targetId, tctx, preArgs);
    }
    return std::pair{targetId, tctx};
  }

  // --- statement transfer ---------------------------------------------------

  void transfer(int m, const Ctx& ctx, const IRStatement& s) {
    switch (s.kind) {
      case IrKind::AllocObject: {
        std::string key = "obj@" + std::to_string(s.id);
        const minipta::ClassDecl* c = prog_.findClass(s.typeName);
        ensureObject(key, c && c->isStruct ? NKind::Struct : NKind::Instance, s.typeName);
        addObj(varPtsRef(var(m, ctx, s.lhs)), key);
        int ctorId = prog_.methodId(s.typeName + ".constructor");
        if (ctorId >= 0) {
          Ctx tctx = calleeCtx(s, ctx, m);
          addObj(varPtsRef(var(ctorId, tctx, "this")), key);
          wire(m, ctx, s, ctorId, tctx);
        }
        break;
      }
      case IrKind::AllocFunction: {
        std::string key = "fn@" + std::to_string(s.id);
        NObject& o = ensureObject(key, NKind::Function, "Function", s.typeName);
        const MethodDecl& owner = prog_.methods[m];
        if (!owner.owner.empty() && !owner.isStatic)
          if (o.capturedThis.insert(var(m, ctx, "this")).second) changed_ = true;
        addObj(varPtsRef(var(m, ctx, s.lhs)), key);
        break;
      }
      case IrKind::Assign:
        if (s.value.isLocal())
          flowSet(varPtsOf(var(m, ctx, s.value.text)), varPtsRef(var(m, ctx, s.lhs)));
        break;
      case IrKind::FieldStore:
        if (s.value.isLocal())
          for (const auto& base : varPtsOf(var(m, ctx, s.base)))
            flowSet(varPtsOf(var(m, ctx, s.value.text)), fieldPtsRef({base, s.name}));
        break;
      case IrKind::FieldLoad:
        if (!s.lhs.empty())
          for (const auto& base : varPtsOf(var(m, ctx, s.base)))
            flowSet(fieldPtsOf({base, s.name}), varPtsRef(var(m, ctx, s.lhs)));
        break;
      case IrKind::StaticCall: {
        int targetId = prog_.methodId(s.name);
        if (targetId >= 0) wire(m, ctx, s, targetId, calleeCtx(s, ctx, m));
        break;
      }
      case IrKind::DynamicCall:
        dynamicCall(m, ctx, s);
        break;
      case IrKind::FunctionPointerCall:
        for (const auto& key : varPtsOf(var(m, ctx, s.base)))
          if (r_.objects.at(key).kind == NKind::Function) invokeFunction(m, ctx, s, key);
        break;
      case IrKind::Return:
        break;
    }
  }

  void dynamicCall(int m, const Ctx& ctx, const IRStatement& s) {
    if (!disabled_.count("sdk") && sdk_ && sdkCall(m, ctx, s)) return;
    if (!disabled_.count("function") && functionCall(m, ctx, s)) return;
    if (!disabled_.count("storage") && storageCall(m, ctx, s)) return;
    if (s.baseIsGlobal || s.base.empty()) return;  // unresolved global symbol

    for (const auto& key : varPtsOf(var(m, ctx, s.base))) {
      const NObject o = r_.objects.at(key);
      if (o.kind == NKind::Function || o.kind == NKind::Cell) continue;
      if (o.kind == NKind::Stub && !prog_.findClass(o.typeName)) continue;
      const MethodDecl* target = prog_.dispatch(o.typeName, s.name);
      if (!target) continue;
      int targetId = prog_.methodId(target->qualifiedName);
      Ctx tctx = calleeCtx(s, ctx, m);
      if (!target->isStatic) addObj(varPtsRef(var(targetId, tctx, "this")), key);
      wire(m, ctx, s, targetId, tctx);
    }
  }

  // --- SDK plugin -----------------------------------------------------------

  static bool isPrimitive(const std::string& t) {
    return t.empty() || t == "number" || t == "string" || t == "boolean" || t == "void";
  }

  const SdkDecl* sdkLookup(const std::string& n) const {
    auto it = sdk_->byName.find(n);
    return it == sdk_->byName.end() ? nullptr : &it->second;
  }

  void applySdkDecl(int m, const Ctx& ctx, const IRStatement& s, const SdkDecl& d) {
    std::string key = "stub@" + std::to_string(s.id);
    ensureObject(key, NKind::Stub, isPrimitive(d.returnType) ? "void" : d.returnType);
    for (std::size_t i = 0; i < s.args.size(); ++i)
      if (auto a = argVar(m, ctx, s, i)) flowSet(varPtsOf(*a), fieldPtsRef({key, "captured"}));
    if (!isPrimitive(d.returnType) && !s.lhs.empty())
      addObj(varPtsRef(var(m, ctx, s.lhs)), key);
    cgEdge(m, ctx, s, "sdk::" + d.qualifiedName);
  }

  bool sdkCall(int m, const Ctx& ctx, const IRStatement& s) {
    if (s.baseIsGlobal) {
      const SdkDecl* d = sdkLookup(s.base.empty() ? s.name : s.base + "." + s.name);
      if (!d) return false;
      applySdkDecl(m, ctx, s, *d);
      return true;
    }
    if (s.base.empty()) return false;
    bool claimed = false;
    for (const auto& key : varPtsOf(var(m, ctx, s.base))) {
      const NObject& o = r_.objects.at(key);
      if (o.kind != NKind::Stub) continue;
      if (const SdkDecl* d = sdkLookup(o.typeName + "." + s.name)) {
        applySdkDecl(m, ctx, s, *d);
        claimed = true;
      }
    }
    return claimed;
  }

  // --- function plugin ------------------------------------------------------

  bool functionCall(int m, const Ctx& ctx, const IRStatement& s) {
    if (s.name != "bind" && s.name != "call" && s.name != "apply") return false;
    if (s.baseIsGlobal || s.base.empty()) return false;
    std::vector<std::string> fns;
    for (const auto& key : varPtsOf(var(m, ctx, s.base)))
      if (r_.objects.at(key).kind == NKind::Function) fns.push_back(key);
    if (fns.empty()) return false;
    for (const auto& fn : fns) {
      if (s.name == "bind") fnBind(m, ctx, s, fn);
      else if (s.name == "call") fnCall(m, ctx, s, fn);
      else fnApply(m, ctx, s, fn);
    }
    return true;
  }

  void fnBind(int m, const Ctx& ctx, const IRStatement& s, const std::string& srcKey) {
    const NObject src = r_.objects.at(srcKey);
    std::string cloneKey = "clone@" + std::to_string(s.id) + "(" + srcKey + ")";
    NObject& c = ensureObject(cloneKey, NKind::Function, "Function", src.funcRef);
    for (const VarKey& capt : src.capturedThis)
      if (c.capturedThis.insert(capt).second) changed_ = true;
    if (src.boundThis) {
      c.boundThis = src.boundThis;  // first bind wins
    } else if (!s.args.empty() && s.args[0].isLocal()) {
      c.boundThis = FieldKey{cloneKey, "__boundThis"};
      flowSet(varPtsOf(*argVar(m, ctx, s, 0)), fieldPtsRef(*c.boundThis));
    }
    std::vector<FieldKey> bound = src.boundArgs;
    for (std::size_t i = 1; i < s.args.size(); ++i) {
      FieldKey slot{cloneKey, "__bound" + std::to_string(bound.size())};
      if (auto a = argVar(m, ctx, s, i)) flowSet(varPtsOf(*a), fieldPtsRef(slot));
      bound.push_back(slot);
    }
    r_.objects.at(cloneKey).boundArgs = std::move(bound);
    if (!s.lhs.empty()) addObj(varPtsRef(var(m, ctx, s.lhs)), cloneKey);
  }

  std::optional<Src> argSrc(int m, const Ctx& ctx, const IRStatement& s, std::size_t i) {
    if (auto a = argVar(m, ctx, s, i)) return varSrc(*a);
    return std::nullopt;
  }

  void fnCall(int m, const Ctx& ctx, const IRStatement& s, const std::string& fn) {
    std::vector<std::optional<Src>> args;
    for (std::size_t i = 1; i < s.args.size(); ++i) args.push_back(argSrc(m, ctx, s, i));
    invokeFunction(m, ctx, s, fn, argSrc(m, ctx, s, 0), &args);
  }

  void fnApply(int m, const Ctx& ctx, const IRStatement& s, const std::string& fn) {
    std::vector<std::optional<Src>> noArgs;
    auto invoked = invokeFunction(m, ctx, s, fn, argSrc(m, ctx, s, 0), &noArgs);
    if (!invoked) return;
    auto [targetId, tctx] = *invoked;
    auto arr = argVar(m, ctx, s, 1);
    if (!arr) return;
    const MethodDecl& target = prog_.methods[targetId];
    std::size_t firstFree = r_.objects.at(fn).boundArgs.size();
    for (const auto& ao : varPtsOf(*arr))
      for (std::size_t pi = firstFree; pi < target.params.size(); ++pi)
        flowSet(fieldPtsOf({ao, "elem"}),
                varPtsRef(var(targetId, tctx, target.params[pi].name)));
  }

  // --- storage plugin -------------------------------------------------------

  static std::string storageApi(const std::string& n) {
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

  FieldKey cellValue(const std::string& instance, const std::string& key) {
    std::string cell = "cell:" + instance + ":" + key;
    ensureObject(cell, NKind::Cell, instance + "." + key);
    if (storeCells_[instance].insert(cell).second) changed_ = true;
    return {cell, "value"};
  }

  FieldKey keyedCell(const std::string& instance, const IRStatement& s, std::size_t idx) {
    if (idx < s.args.size() && s.args[idx].isString())
      return cellValue(instance, s.args[idx].text);
    std::string wc = "cell:" + instance + ":*";
    ensureObject(wc, NKind::Cell, instance + ".*");
    if (storeWildcard_.insert(instance).second) changed_ = true;
    return {wc, "value"};
  }

  void storeApiCall(int m, const Ctx& ctx, const IRStatement& s, const std::string& instance) {
    const std::string name = storageApi(s.name);
    if (name == "setOrCreate" || name == "set") {
      FieldKey cell = keyedCell(instance, s, 0);
      if (auto v = argVar(m, ctx, s, 1)) flowSet(varPtsOf(*v), fieldPtsRef(cell));
      return;
    }
    if (name == "get") {
      FieldKey cell = keyedCell(instance, s, 0);
      if (!s.lhs.empty()) flowSet(fieldPtsOf(cell), varPtsRef(var(m, ctx, s.lhs)));
      return;
    }
    bool isLink = name == "link" || name == "setAndLink";
    FieldKey cell = keyedCell(instance, s, 0);
    std::string handle = "handle@" + std::to_string(s.id);
    ensureObject(handle, NKind::Cell, isLink ? "storage-link" : "storage-prop");
    FieldKey value{handle, "value"};
    flowSet(fieldPtsOf(cell), fieldPtsRef(value));
    if (isLink) linkHandleCell_[handle] = cell;
    if (name == "setAndLink" || name == "setAndProp") {
      if (auto v = argVar(m, ctx, s, 1)) {
        flowSet(varPtsOf(*v), fieldPtsRef(value));
        if (isLink) flowSet(varPtsOf(*v), fieldPtsRef(cell));
      }
    }
    if (!s.lhs.empty()) addObj(varPtsRef(var(m, ctx, s.lhs)), handle);
  }

  bool storageCall(int m, const Ctx& ctx, const IRStatement& s) {
    if (s.base == "this" && (s.name == "__storageLink" || s.name == "__storageProp")) {
      bool isLink = s.name == "__storageLink";
      if (s.args.size() >= 2 && s.args[0].isString() && s.args[1].isString()) {
        FieldKey cell = cellValue("AppStorage", s.args[0].text);
        for (const auto& key : varPtsOf(var(m, ctx, "this"))) {
          const NObject& o = r_.objects.at(key);
          if (o.kind != NKind::Instance && o.kind != NKind::Struct) continue;
          FieldKey field{key, s.args[1].text};
          flowSet(fieldPtsOf(cell), fieldPtsRef(field));
          if (isLink) flowSet(fieldPtsOf(field), fieldPtsRef(cell));
        }
      }
      return true;
    }
    if (storageApi(s.name).empty()) return false;
    if (s.baseIsGlobal && s.base == "AppStorage") {
      storeApiCall(m, ctx, s, "AppStorage");
      cgEdge(m, ctx, s, "storage::AppStorage." + s.name);
      return true;
    }
    if (!s.baseIsGlobal && !s.base.empty()) {
      bool claimed = false;
      for (const auto& key : varPtsOf(var(m, ctx, s.base))) {
        const NObject o = r_.objects.at(key);
        if (o.kind == NKind::Instance && o.typeName == "LocalStorage") {
          storeApiCall(m, ctx, s, key);
          cgEdge(m, ctx, s, "storage::LocalStorage." + s.name);
          claimed = true;
        } else if (o.kind == NKind::Cell && key.rfind("handle@", 0) == 0 &&
                   (s.name == "set" || s.name == "get")) {
          FieldKey value{key, "value"};
          if (s.name == "set") {
            if (auto v = argVar(m, ctx, s, 0)) flowSet(varPtsOf(*v), fieldPtsRef(value));
          } else if (!s.lhs.empty()) {
            flowSet(fieldPtsOf(value), varPtsRef(var(m, ctx, s.lhs)));
          }
          cgEdge(m, ctx, s, "storage::handle." + s.name);
          claimed = true;
        }
      }
      return claimed;
    }
    return false;
  }
};

inline NaiveResult naive_solve(const IRProgram& prog, const std::vector<std::string>& entries,
                               ContextSelector sel, std::set<std::string> disabled = {},
                               std::optional<SdkDecls> sdk = std::nullopt) {
  return NaiveSolver(prog, sel, std::move(disabled), std::move(sdk)).run(entries);
}

}  // namespace naive
