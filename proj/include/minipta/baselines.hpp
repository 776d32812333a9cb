#pragma once

#include <chrono>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "minipta/callgraph.hpp"
#include "minipta/ir.hpp"

namespace minipta {

struct BaselineResult {
  CallGraph cg{CgAlgorithm::CHA};
  int iterations = 0;
  double timeMs = 0.0;
};

// Type-based call-graph baselines over the same IR (including the synthetic
// DummyMain), context-insensitive.
//
// CHA resolves a dynamic call through the declared type of the receiver: one
// target per class in the cone of the declared type. Without a usable
// declared type it falls back to every instance method with the called name.
// Function-pointer calls go to every free function or lambda that can accept
// the provided argument count.
//
// RTA additionally restricts receivers to classes instantiated in reachable
// code, and function-pointer targets to function objects allocated in
// reachable code.
class BaselineAnalysis {
 public:
  static BaselineResult run(const IRProgram& prog, const std::vector<std::string>& entries,
                            bool rta) {
    BaselineAnalysis a(prog, rta);
    return a.solve(entries);
  }

 private:
  const IRProgram& prog_;
  bool rta_;
  CallGraph cg_;
  std::set<int> reachable_;
  std::deque<int> queue_;
  std::set<std::string> instantiated_;   // class names (RTA)
  std::set<std::string> allocatedFns_;   // method qualified names (RTA)

  BaselineAnalysis(const IRProgram& prog, bool rta)
      : prog_(prog), rta_(rta), cg_(rta ? CgAlgorithm::RTA : CgAlgorithm::CHA) {}

  void reach(int methodId) {
    if (methodId < 0 || !reachable_.insert(methodId).second) return;
    queue_.push_back(methodId);
  }

  bool classAllowed(const std::string& name) const {
    return !rta_ || instantiated_.count(name) > 0;
  }
  bool fnAllowed(const std::string& qn) const { return !rta_ || allocatedFns_.count(qn) > 0; }

  void addEdge(const IRStatement& s, const MethodDecl& caller, const std::string& target) {
    cg_.addEdge(s.id, {}, caller.qualifiedName, target);
  }

  BaselineResult solve(const std::vector<std::string>& entries) {
    auto start = std::chrono::steady_clock::now();
    int iterations = 0;
    bool grew = true;
    // RTA's instantiation sets grow as methods become reachable, which can
    // unlock targets at already-visited call sites; iterate to fixpoint.
    while (grew) {
      ++iterations;
      std::size_t before = cg_.size();
      std::size_t beforeReach = reachable_.size();
      reachable_.clear();
      queue_.clear();
      for (const auto& qn : entries) reach(prog_.methodId(qn));
      while (!queue_.empty()) {
        int id = queue_.front();
        queue_.pop_front();
        visit(id);
      }
      grew = cg_.size() != before || reachable_.size() != beforeReach;
    }
    BaselineResult r;
    r.cg = std::move(cg_);
    r.iterations = iterations;
    r.timeMs =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return r;
  }

  void visit(int methodId) {
    const MethodDecl& m = prog_.methods[methodId];
    for (const IRStatement& s : m.body) {
      switch (s.kind) {
        case IrKind::AllocObject: {
          if (rta_) instantiated_.insert(s.typeName);
          int ctor = prog_.methodId(s.typeName + ".constructor");
          if (ctor >= 0) {
            addEdge(s, m, s.typeName + ".constructor");
            reach(ctor);
          }
          break;
        }
        case IrKind::AllocFunction:
          if (rta_) allocatedFns_.insert(s.typeName);
          break;
        case IrKind::StaticCall: {
          int t = prog_.methodId(s.name);
          if (t >= 0) {
            addEdge(s, m, s.name);
            reach(t);
          }
          break;
        }
        case IrKind::DynamicCall:
          resolveDynamic(s, m);
          break;
        case IrKind::FunctionPointerCall:
          resolveFunctionPointer(s, m);
          break;
        default:
          break;
      }
    }
  }

  void resolveDynamic(const IRStatement& s, const MethodDecl& caller) {
    if (s.name.rfind("__storage", 0) == 0) return;  // plugin-internal
    if (s.baseIsGlobal || s.base.empty()) return;   // SDK / store call, outside the program

    TypeRef bt = caller.typeOfLocal(s.base);
    std::set<std::string> targets;
    bool typed = false;
    for (const std::string& member : bt.members) {
      if (!prog_.findClass(member)) continue;
      typed = true;
      for (const std::string& c : prog_.cone(member)) {
        if (!classAllowed(c)) continue;
        if (const MethodDecl* t = prog_.dispatch(c, s.name)) targets.insert(t->qualifiedName);
      }
    }
    if (!typed) {
      // no declared class type: any instance method with this name
      for (const MethodDecl& t : prog_.methods) {
        if (t.owner.empty() || t.isStatic || t.isConstructor || t.name != s.name) continue;
        if (!classAllowed(t.owner)) continue;
        targets.insert(t.qualifiedName);
      }
    }
    for (const std::string& t : targets) {
      addEdge(s, caller, t);
      reach(prog_.methodId(t));
    }
  }

  void resolveFunctionPointer(const IRStatement& s, const MethodDecl& caller) {
    for (const MethodDecl& t : prog_.methods) {
      bool fnValue = t.owner.empty() ? t.qualifiedName != "DummyMain" && !t.isConstructor
                                     : t.isAnonymous;
      if (!fnValue) continue;
      if (t.params.size() < s.args.size()) continue;  // cannot accept that many arguments
      if (!fnAllowed(t.qualifiedName)) continue;
      addEdge(s, caller, t.qualifiedName);
      reach(prog_.methodId(t.qualifiedName));
    }
  }
};

inline BaselineResult run_cha(const IRProgram& prog, const std::vector<std::string>& entries) {
  return BaselineAnalysis::run(prog, entries, /*rta=*/false);
}
inline BaselineResult run_rta(const IRProgram& prog, const std::vector<std::string>& entries) {
  return BaselineAnalysis::run(prog, entries, /*rta=*/true);
}

}  // namespace minipta
