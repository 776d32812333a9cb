#pragma once

#include <map>
#include <string>
#include <vector>

#include "minipta/diagnostics.hpp"
#include "minipta/ir.hpp"

namespace minipta {

using CtxId = int;
inline constexpr CtxId kEmptyCtx = 0;

enum class ContextKind { Insensitive, CallsiteK, FunctionK };

inline const char* contextKindName(ContextKind k) {
  switch (k) {
    case ContextKind::Insensitive: return "insensitive";
    case ContextKind::CallsiteK: return "callsite";
    case ContextKind::FunctionK: return "function";
  }
  return "?";
}

// k-limited context strings, interned: structurally equal strings share one id.
// Elements are dense integers (call-site statement ids for callsite-k, method
// ids for function-k), most recent first.
class ContextInterner {
 public:
  ContextInterner() { intern({}); }

  CtxId intern(const std::vector<int>& elems) {
    auto it = ids_.find(elems);
    if (it != ids_.end()) return it->second;
    CtxId id = static_cast<CtxId>(strings_.size());
    ids_[elems] = id;
    strings_.push_back(elems);
    return id;
  }

  const std::vector<int>& elements(CtxId id) const { return strings_[id]; }
  std::size_t size() const { return strings_.size(); }

  std::string str(CtxId id) const {
    std::string s = "[";
    const auto& e = strings_[id];
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(e[i]);
    }
    return s + "]";
  }

 private:
  std::map<std::vector<int>, CtxId> ids_;
  std::vector<std::vector<int>> strings_;
};

struct ContextSelector {
  ContextKind kind = ContextKind::CallsiteK;
  int k = 2;  // 0..5

  void validate() const {
    if (k < 0 || k > 5)
      throw AnalysisError({Severity::Error, {}, "context depth k must be in [0,5]"});
  }
};

// [OP] select_callee_context
//
// callsite-k prepends the call-site statement id, function-k prepends the
// caller method id; both truncate to k. k=0 and the insensitive selector
// always yield the empty context.
inline CtxId select_callee_context(ContextInterner& interner, const ContextSelector& sel,
                                   int callsiteStmtId, CtxId callerCtx, int callerMethodId) {
  if (sel.kind == ContextKind::Insensitive || sel.k == 0) return kEmptyCtx;
  std::vector<int> elems;
  elems.push_back(sel.kind == ContextKind::CallsiteK ? callsiteStmtId : callerMethodId);
  const auto& caller = interner.elements(callerCtx);
  for (int e : caller) {
    if ((int)elems.size() >= sel.k) break;
    elems.push_back(e);
  }
  return interner.intern(elems);
}

// [OP] should_suppress_context
//
// Accesses whose base is globalThis (or another registered singleton, e.g.
// the AppStorage store) use the empty context so every calling context sees
// the same node.
inline bool should_suppress_context(const IRStatement& s) {
  if (s.base == "globalThis") return true;
  if (s.baseIsGlobal) return true;  // AppStorage / SDK modules are singletons
  return false;
}

}  // namespace minipta
