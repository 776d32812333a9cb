#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minipta/ir.hpp"

namespace minipta {

enum class CgAlgorithm { PTA, CHA, RTA };

inline const char* cgAlgorithmName(CgAlgorithm a) {
  switch (a) {
    case CgAlgorithm::PTA: return "pta";
    case CgAlgorithm::CHA: return "cha";
    case CgAlgorithm::RTA: return "rta";
  }
  return "?";
}

// One resolved edge. `ctx` holds the caller context elements (empty for
// context-insensitive algorithms); `target` is a method qualified name or a
// synthetic "sdk::..." marker for calls that leave the analyzed program.
struct CgEdge {
  int callsite = -1;
  std::vector<int> ctx;
  std::string caller;  // qualified name of the method containing the call site
  std::string target;

  bool operator<(const CgEdge& o) const {
    return std::tie(callsite, ctx, caller, target) <
           std::tie(o.callsite, o.ctx, o.caller, o.target);
  }
  bool operator==(const CgEdge&) const = default;
};

class CallGraph {
 public:
  explicit CallGraph(CgAlgorithm algo = CgAlgorithm::PTA) : algo_(algo) {}

  CgAlgorithm algorithm() const { return algo_; }

  bool addEdge(int callsite, std::vector<int> ctx, std::string caller, std::string target) {
    return edges_.insert({callsite, std::move(ctx), std::move(caller), std::move(target)})
        .second;
  }

  const std::set<CgEdge>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }

  // Context-erased view: distinct (call site, target) pairs.
  std::set<std::pair<int, std::string>> erased() const {
    std::set<std::pair<int, std::string>> out;
    for (const auto& e : edges_) out.insert({e.callsite, e.target});
    return out;
  }

  // Erased targets of one call site, sorted.
  std::set<std::string> targetsAt(int callsite) const {
    std::set<std::string> out;
    for (const auto& e : edges_)
      if (e.callsite == callsite) out.insert(e.target);
    return out;
  }

  std::set<int> callsites() const {
    std::set<int> out;
    for (const auto& e : edges_) out.insert(e.callsite);
    return out;
  }

  nlohmann::json toJson() const {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : edges_) {
      nlohmann::json j{{"callsite", e.callsite}, {"caller", e.caller}, {"target", e.target}};
      if (!e.ctx.empty()) j["context"] = e.ctx;
      edges.push_back(std::move(j));
    }
    return {{"algorithm", cgAlgorithmName(algo_)}, {"edges", edges}};
  }

  // Method-level DOT (contexts and call sites folded into edge labels).
  std::string toDot() const {
    std::set<std::string> methods;
    std::map<std::pair<std::string, std::string>, std::set<int>> sites;
    for (const auto& e : edges_) {
      methods.insert(e.caller);
      methods.insert(e.target);
      sites[{e.caller, e.target}].insert(e.callsite);
    }
    std::ostringstream os;
    os << "digraph callgraph {\n";
    for (const auto& m : methods) os << "  \"" << m << "\";\n";
    for (const auto& [pair, ids] : sites) {
      os << "  \"" << pair.first << "\" -> \"" << pair.second << "\" [label=\"";
      bool first = true;
      for (int id : ids) {
        if (!first) os << ",";
        os << id;
        first = false;
      }
      os << "\"];\n";
    }
    os << "}\n";
    return os.str();
  }

 private:
  CgAlgorithm algo_;
  std::set<CgEdge> edges_;
};

}  // namespace minipta
