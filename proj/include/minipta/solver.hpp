#pragma once

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "minipta/callgraph.hpp"
#include "minipta/context.hpp"
#include "minipta/diagnostics.hpp"
#include "minipta/ir.hpp"
#include "minipta/pag.hpp"

namespace minipta {

class Solver;

// A call site the core rules could not resolve yet (dynamic and
// function-pointer calls). The queue is re-examined every outer pass; all
// handling must be idempotent.
struct PendingCall {
  const IRStatement* stmt = nullptr;
  int methodId = -1;  // caller
  CtxId ctx = kEmptyCtx;
};

// Extension point for framework-specific call semantics. Plugins are
// consulted in descending priority before the core object-dispatch rules;
// returning true claims the call site entirely.
class Plugin {
 public:
  virtual ~Plugin() = default;
  virtual std::string name() const = 0;
  virtual int priority() const = 0;
  virtual bool handleDynamicCall(Solver& solver, const PendingCall& call) = 0;
};

struct SolverOptions {
  ContextSelector selector;
  double timeoutSeconds = 1200.0;
};

struct SolverStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t cgEdges = 0;
  int iterations = 0;
  double timeMs = 0.0;
  std::size_t peakPtsSize = 0;
};

struct AnalysisResult {
  Pag pag;
  ContextInterner ctxs;
  CallGraph cg{CgAlgorithm::PTA};
  SolverStats stats;
  std::vector<Diagnostic> diagnostics;
  // deterministic label -> sorted heap-object keys, for golden comparisons
  std::map<std::string, std::vector<std::string>> points_to;
};

// Inclusion-based, context-sensitive points-to solver with on-the-fly call
// graph construction. Outer fixpoint: initialize newly reachable
// (method, context) activations, run difference propagation to quiescence,
// then retry every pending dynamic / function-pointer call; repeat until
// nothing changes.
class Solver {
 public:
  Solver(const IRProgram& program, SolverOptions opts, DiagnosticSink& diags,
         std::vector<std::unique_ptr<Plugin>> plugins = {})
      : prog_(program), opts_(std::move(opts)), diags_(diags), plugins_(std::move(plugins)) {
    opts_.selector.validate();
    std::sort(plugins_.begin(), plugins_.end(),
              [](const auto& a, const auto& b) { return a->priority() > b->priority(); });
  }

  AnalysisResult run(const std::vector<std::string>& entryMethods) {
    start_ = std::chrono::steady_clock::now();
    for (const auto& qn : entryMethods) {
      int id = prog_.methodId(qn);
      if (id < 0)
        throw AnalysisError({Severity::Error, {}, "entry method '" + qn + "' not found"});
      enqueueWork(id, kEmptyCtx);
    }

    int iterations = 0;
    do {
      changed_ = false;
      ++iterations;
      checkTimeout();
      std::size_t drained = 0;
      while (!workQueue_.empty()) {
        if ((++drained & 0xff) == 0) checkTimeout();
        auto [m, c] = workQueue_.front();
        workQueue_.pop_front();
        initWorkItem(m, c);
      }
      solveConstraints();
      for (const auto& pc : pendingDynamic_) solveDynamicCall(pc);
      for (const auto& pc : pendingFunctionPtr_) solveFunctionPointerCall(pc);
      solveConstraints();
    } while (changed_);

    AnalysisResult r;
    r.stats.iterations = iterations;
    r.stats.nodes = pag_.nodeCount();
    r.stats.edges = pag_.edgeCount();
    r.stats.cgEdges = cg_.size();
    r.stats.peakPtsSize = pag_.peakPtsSize();
    r.stats.timeMs = elapsedMs();
    for (const PagNode& n : pag_.nodes()) {
      std::vector<std::string> keys;
      for (ObjId o : pag_.pts(n.id)) keys.push_back(pag_.object(o).key);
      r.points_to[nodeLabel(pag_, prog_, ctxs_, n)] = std::move(keys);
    }
    r.diagnostics = diags_.all();
    r.pag = std::move(pag_);
    r.ctxs = std::move(ctxs_);
    r.cg = std::move(cg_);
    return r;
  }

  // --- facilities shared with plugins ---------------------------------------

  const IRProgram& program() const { return prog_; }
  Pag& pag() { return pag_; }
  ContextInterner& ctxs() { return ctxs_; }
  CallGraph& cg() { return cg_; }
  DiagnosticSink& diags() { return diags_; }
  const ContextSelector& selector() const { return opts_.selector; }

  // Variable-pointer node; globalThis collapses to one singleton node whose
  // points-to set is pre-seeded with the global object.
  NodeId varNode(const std::string& local, int methodId, CtxId ctx) {
    if (local == "globalThis") return globalNode();
    return pag_.nodeForVar(local, methodId, ctx);
  }

  NodeId globalNode() {
    if (globalNode_ < 0) {
      globalNode_ = pag_.nodeForVar("globalThis", -1, kEmptyCtx);
      ObjId g = pag_.getOrCreateObject("global", ObjKind::ClassInstance, "globalThis", -1,
                                       {"<builtin>", 0, 0});
      addPointsTo(globalNode_, g);
    }
    return globalNode_;
  }

  std::optional<NodeId> lhsNode(const PendingCall& pc) {
    if (pc.stmt->lhs.empty()) return std::nullopt;
    return varNode(pc.stmt->lhs, pc.methodId, pc.ctx);
  }
  std::optional<NodeId> argNode(const PendingCall& pc, std::size_t i) {
    if (i >= pc.stmt->args.size() || !pc.stmt->args[i].isLocal()) return std::nullopt;
    return varNode(pc.stmt->args[i].text, pc.methodId, pc.ctx);
  }
  NodeId receiverNode(const PendingCall& pc) {
    return varNode(pc.stmt->base, pc.methodId, pc.ctx);
  }

  // Adds an inclusion edge and propagates the source's current set across it.
  void copyEdge(NodeId src, NodeId dst, EdgeLabel label) {
    if (!pag_.addEdge(src, dst, label)) return;
    changed_ = true;
    const auto& sp = pag_.pts(src);
    std::vector<ObjId> d = pag_.addPts(dst, {sp.begin(), sp.end()});
    if (!d.empty()) propQueue_.push_back({dst, std::move(d)});
  }

  void addPointsTo(NodeId node, ObjId obj) {
    std::vector<ObjId> d = pag_.addPts(node, {obj});
    if (!d.empty()) {
      changed_ = true;
      propQueue_.push_back({node, std::move(d)});
    }
  }

  void warnOnce(int stmtId, const std::string& msg, const SourceLoc& loc) {
    if (warned_.insert({stmtId, msg}).second) diags_.warn(loc, msg);
  }

  // Callee context for a call executed at `pc`. Singleton receivers
  // (globalThis, global stores) are analyzed context-insensitively.
  CtxId calleeContext(const PendingCall& pc, bool forceSuppress = false) {
    if (forceSuppress || should_suppress_context(*pc.stmt)) return kEmptyCtx;
    return select_callee_context(ctxs_, opts_.selector, pc.stmt->id, pc.ctx, pc.methodId);
  }

  bool addCgEdge(const PendingCall& pc, const std::string& target) {
    bool fresh = cg_.addEdge(pc.stmt->id, ctxs_.elements(pc.ctx),
                             prog_.methods[pc.methodId].qualifiedName, target);
    if (fresh) changed_ = true;
    return fresh;
  }

  void enqueueWork(int methodId, CtxId ctx) {
    if (!visitedWork_.insert({methodId, ctx}).second) return;
    workQueue_.push_back({methodId, ctx});
    changed_ = true;
  }

  // Parameter / return plumbing for a resolved call. `preArgs` are implicit
  // leading arguments (bound values); statement arguments follow them. Empty
  // optionals are placeholders for literal arguments: they consume a
  // parameter position but carry no objects.
  void wireCall(const PendingCall& pc, int targetId, CtxId calleeCtx,
                const std::vector<std::optional<NodeId>>& preArgs = {},
                bool skipStmtArgs = false) {
    const MethodDecl& target = prog_.methods[targetId];
    std::size_t pi = 0;
    for (const auto& a : preArgs) {
      if (pi >= target.params.size()) break;
      if (a)
        copyEdge(*a, pag_.nodeForVar(target.params[pi].name, targetId, calleeCtx),
                 EdgeLabel::ParamBinding);
      ++pi;
    }
    if (!skipStmtArgs) {
      for (std::size_t i = 0; i < pc.stmt->args.size() && pi < target.params.size();
           ++i, ++pi) {
        if (auto a = argNode(pc, i))
          copyEdge(*a, pag_.nodeForVar(target.params[pi].name, targetId, calleeCtx),
                   EdgeLabel::ParamBinding);
      }
    }
    if (auto l = lhsNode(pc))
      for (const std::string& rv : returnLocals(targetId))
        copyEdge(pag_.nodeForVar(rv, targetId, calleeCtx), *l, EdgeLabel::ReturnBinding);
    addCgEdge(pc, target.qualifiedName);
    enqueueWork(targetId, calleeCtx);
  }

  // Invokes one function object at `pc`. Precedence for `this`: explicit
  // binding on the object, then the caller-supplied receiver, then the
  // lexical `this` captured at the allocation site.
  // Returns (targetId, calleeCtx) so callers can add extra argument wiring.
  std::optional<std::pair<int, CtxId>> invokeFunctionObject(
      const PendingCall& pc, ObjId fnObj, std::optional<NodeId> explicitThis = std::nullopt,
      const std::vector<std::optional<NodeId>>* argsOverride = nullptr) {
    const HeapObject& fn = pag_.object(fnObj);
    int targetId = prog_.methodId(fn.funcRef);
    if (targetId < 0) {
      warnOnce(pc.stmt->id, "function object refers to unknown method '" + fn.funcRef + "'",
               pc.stmt->loc);
      return std::nullopt;
    }
    const MethodDecl& target = prog_.methods[targetId];
    CtxId calleeCtx = calleeContext(pc);

    if (!target.owner.empty() && !target.isStatic) {
      NodeId calleeThis = pag_.nodeForVar("this", targetId, calleeCtx);
      if (fn.boundThis) {
        copyEdge(*fn.boundThis, calleeThis, EdgeLabel::ThisBinding);
      } else if (explicitThis) {
        copyEdge(*explicitThis, calleeThis, EdgeLabel::ThisBinding);
      } else {
        for (NodeId capt : fn.capturedThis)
          copyEdge(capt, calleeThis, EdgeLabel::ThisBinding);
      }
    }

    std::vector<std::optional<NodeId>> preArgs(fn.boundArgs.begin(), fn.boundArgs.end());
    if (argsOverride) {
      preArgs.insert(preArgs.end(), argsOverride->begin(), argsOverride->end());
      wireCall(pc, targetId, calleeCtx, preArgs, /*skipStmtArgs=*/true);
    } else {
      wireCall(pc, targetId, calleeCtx, preArgs);
    }
    return std::pair{targetId, calleeCtx};
  }

  // Difference propagation to quiescence.
  void solveConstraints() {
    std::size_t steps = 0;
    while (!propQueue_.empty()) {
      if ((++steps & 0xfff) == 0) checkTimeout();
      auto [node, delta] = std::move(propQueue_.front());
      propQueue_.pop_front();
      changed_ = true;

      // materialize field constraints for newly seen base objects
      if (auto it = loads_.find(node); it != loads_.end())
        for (const auto& [field, dst] : it->second)
          for (ObjId o : delta) copyEdge(pag_.nodeForField(o, field), dst, EdgeLabel::Copy);
      if (auto it = stores_.find(node); it != stores_.end())
        for (const auto& [field, src] : it->second)
          for (ObjId o : delta) copyEdge(src, pag_.nodeForField(o, field), EdgeLabel::Copy);

      for (NodeId succ : pag_.successors(node)) {
        std::vector<ObjId> d2 = pag_.addPts(succ, delta);
        if (!d2.empty()) propQueue_.push_back({succ, std::move(d2)});
      }
    }
  }

 private:
  const IRProgram& prog_;
  SolverOptions opts_;
  DiagnosticSink& diags_;
  std::vector<std::unique_ptr<Plugin>> plugins_;

  Pag pag_;
  ContextInterner ctxs_;
  CallGraph cg_{CgAlgorithm::PTA};

  bool changed_ = false;
  NodeId globalNode_ = -1;
  std::deque<std::pair<int, CtxId>> workQueue_;
  std::set<std::pair<int, CtxId>> visitedWork_;
  std::deque<std::pair<NodeId, std::vector<ObjId>>> propQueue_;
  std::vector<PendingCall> pendingDynamic_;
  std::vector<PendingCall> pendingFunctionPtr_;
  std::map<NodeId, std::vector<std::pair<std::string, NodeId>>> loads_;
  std::map<NodeId, std::vector<std::pair<std::string, NodeId>>> stores_;
  std::map<int, std::vector<std::string>> returnLocals_;
  std::set<std::pair<int, std::string>> warned_;
  std::chrono::steady_clock::time_point start_;

  double elapsedMs() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }
  void checkTimeout() const {
    if (elapsedMs() > opts_.timeoutSeconds * 1000.0) throw TimeoutError(opts_.timeoutSeconds);
  }

  const std::vector<std::string>& returnLocals(int methodId) {
    auto it = returnLocals_.find(methodId);
    if (it != returnLocals_.end()) return it->second;
    std::vector<std::string> rv;
    for (const IRStatement& s : prog_.methods[methodId].body)
      if (s.kind == IrKind::Return && s.value.isLocal()) rv.push_back(s.value.text);
    return returnLocals_[methodId] = std::move(rv);
  }

  void registerLoad(NodeId base, const std::string& field, NodeId dst) {
    loads_[base].push_back({field, dst});
    for (ObjId o : std::vector<ObjId>(pag_.pts(base).begin(), pag_.pts(base).end()))
      copyEdge(pag_.nodeForField(o, field), dst, EdgeLabel::Copy);
    changed_ = true;
  }
  void registerStore(NodeId base, const std::string& field, NodeId src) {
    stores_[base].push_back({field, src});
    for (ObjId o : std::vector<ObjId>(pag_.pts(base).begin(), pag_.pts(base).end()))
      copyEdge(src, pag_.nodeForField(o, field), EdgeLabel::Copy);
    changed_ = true;
  }

  // Seeds the constraints of one newly reachable (method, context) activation.
  void initWorkItem(int methodId, CtxId ctx) {
    const MethodDecl& m = prog_.methods[methodId];
    for (const IRStatement& s : m.body) {
      PendingCall pc{&s, methodId, ctx};
      switch (s.kind) {
        case IrKind::AllocObject: {
          ObjId o = pag_.getOrCreateObject(
              Pag::allocKey(s.id, kEmptyCtx, false),
              classIsStruct(s.typeName) ? ObjKind::StructInstance : ObjKind::ClassInstance,
              s.typeName, s.id, s.loc);
          addPointsTo(varNode(s.lhs, methodId, ctx), o);
          // the allocation site is also a call site of the constructor
          int ctorId = prog_.methodId(s.typeName + ".constructor");
          if (ctorId >= 0) {
            CtxId calleeCtx = calleeContext(pc);
            addPointsTo(pag_.nodeForVar("this", ctorId, calleeCtx), o);
            wireCall(pc, ctorId, calleeCtx);
          }
          break;
        }
        case IrKind::AllocFunction: {
          ObjId o = pag_.getOrCreateObject(Pag::allocKey(s.id, kEmptyCtx, true),
                                           ObjKind::FunctionObject, "Function", s.id, s.loc,
                                           kEmptyCtx, s.typeName);
          if (!m.owner.empty() && !m.isStatic)
            pag_.object(o).capturedThis.insert(varNode("this", methodId, ctx));
          addPointsTo(varNode(s.lhs, methodId, ctx), o);
          break;
        }
        case IrKind::Assign:
          if (s.value.isLocal())
            copyEdge(varNode(s.value.text, methodId, ctx), varNode(s.lhs, methodId, ctx),
                     EdgeLabel::Copy);
          break;
        case IrKind::FieldStore:
          if (s.value.isLocal())
            registerStore(varNode(s.base, methodId, ctx), s.name,
                          varNode(s.value.text, methodId, ctx));
          break;
        case IrKind::FieldLoad:
          if (!s.lhs.empty())
            registerLoad(varNode(s.base, methodId, ctx), s.name,
                         varNode(s.lhs, methodId, ctx));
          break;
        case IrKind::StaticCall: {
          int targetId = prog_.methodId(s.name);
          if (targetId < 0) {
            warnOnce(s.id, "unresolved static call to '" + s.name + "'", s.loc);
            break;
          }
          wireCall(pc, targetId, calleeContext(pc));
          break;
        }
        case IrKind::DynamicCall:
          pendingDynamic_.push_back(pc);
          changed_ = true;
          break;
        case IrKind::FunctionPointerCall:
          pendingFunctionPtr_.push_back(pc);
          changed_ = true;
          break;
        case IrKind::Return:
          break;  // wired from the caller side
      }
    }
  }

  bool classIsStruct(const std::string& name) const {
    const ClassDecl* c = prog_.findClass(name);
    return c && c->isStruct;
  }

  void solveDynamicCall(const PendingCall& pc) {
    for (const auto& p : plugins_)
      if (p->handleDynamicCall(*this, pc)) return;

    const IRStatement& s = *pc.stmt;
    if (s.baseIsGlobal || s.base.empty()) {
      warnOnce(s.id,
               "unresolved call to global symbol '" +
                   (s.base.empty() ? s.name : s.base + "." + s.name) + "'",
               s.loc);
      return;
    }

    NodeId recv = receiverNode(pc);
    const auto& set = pag_.pts(recv);
    std::vector<ObjId> objs(set.begin(), set.end());
    for (ObjId oid : objs) {
      const HeapObject& o = pag_.object(oid);
      switch (o.kind) {
        case ObjKind::FunctionObject:
          warnOnce(s.id, "method '" + s.name + "' called on a function value", s.loc);
          break;
        case ObjKind::StorageCell:
          warnOnce(s.id, "storage handle used without the storage plugin", s.loc);
          break;
        case ObjKind::SdkStub:
          // a stub typed as a program-declared class dispatches like an
          // instance of that class; otherwise we know nothing about it
          if (!prog_.findClass(o.typeName)) {
            warnOnce(s.id,
                     "unknown member '" + s.name + "' on SDK value of type '" + o.typeName +
                         "'",
                     s.loc);
            break;
          }
          [[fallthrough]];
        case ObjKind::ClassInstance:
        case ObjKind::StructInstance: {
          const MethodDecl* target = prog_.dispatch(o.typeName, s.name);
          if (!target) {
            warnOnce(s.id, "cannot resolve method '" + s.name + "' on type '" + o.typeName + "'",
                     s.loc);
            break;
          }
          int targetId = prog_.methodId(target->qualifiedName);
          CtxId calleeCtx = calleeContext(pc);
          if (!target->isStatic)
            addPointsTo(pag_.nodeForVar("this", targetId, calleeCtx), oid);
          wireCall(pc, targetId, calleeCtx);
          break;
        }
      }
    }
  }

  void solveFunctionPointerCall(const PendingCall& pc) {
    NodeId callee = receiverNode(pc);
    const auto& set = pag_.pts(callee);
    std::vector<ObjId> objs(set.begin(), set.end());
    for (ObjId oid : objs) {
      if (pag_.object(oid).kind != ObjKind::FunctionObject) {
        warnOnce(pc.stmt->id,
                 "called value '" + pc.stmt->base + "' is not a function (points to " +
                     pag_.object(oid).key + ")",
                 pc.stmt->loc);
        continue;
      }
      invokeFunctionObject(pc, oid);
    }
  }
};

}  // namespace minipta
