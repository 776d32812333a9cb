#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "minipta/callgraph.hpp"
#include "minipta/diagnostics.hpp"

namespace minipta {

// Ground truth: call-site statement id -> expected (context-erased) targets.
using GroundTruth = std::map<int, std::set<std::string>>;

inline GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  GroundTruth out;
  for (const auto& [key, targets] : j.items()) {
    int id;
    try {
      id = std::stoi(key);
    } catch (const std::exception&) {
      throw AnalysisError({Severity::Error, {}, "ground truth key '" + key +
                                                    "' is not a statement id"});
    }
    std::set<std::string>& set = out[id];
    for (const auto& t : targets) set.insert(t.get<std::string>());
  }
  return out;
}

struct SiteComparison {
  int callsite = 0;
  std::set<std::string> expected;
  std::set<std::string> computed;
  std::set<std::string> missing;   // expected \ computed
  std::set<std::string> spurious;  // computed \ expected
};

// Call-graph quality against labeled call sites. Precision counts over the
// edges the analysis reports at labeled sites; recall over the expected
// edges. Unlabeled call sites don't participate.
struct ComparisonResult {
  std::size_t truePositives = 0;
  std::size_t computedEdges = 0;
  std::size_t expectedEdges = 0;
  std::vector<SiteComparison> sites;

  double precision() const {
    return computedEdges == 0 ? 1.0 : (double)truePositives / (double)computedEdges;
  }
  double recall() const {
    return expectedEdges == 0 ? 1.0 : (double)truePositives / (double)expectedEdges;
  }

  nlohmann::json toJson() const {
    auto pct = [](double v) { return std::round(v * 1000.0) / 10.0; };  // one decimal, percent
    nlohmann::json sitesJson = nlohmann::json::array();
    for (const auto& s : sites) {
      sitesJson.push_back({{"callsite", s.callsite},
                           {"expected", s.expected},
                           {"computed", s.computed},
                           {"missing", s.missing},
                           {"spurious", s.spurious}});
    }
    return {{"true_positives", truePositives},
            {"computed_edges", computedEdges},
            {"expected_edges", expectedEdges},
            {"precision_pct", pct(precision())},
            {"recall_pct", pct(recall())},
            {"sites", sitesJson}};
  }
};

inline ComparisonResult compare(const CallGraph& cg, const GroundTruth& truth) {
  ComparisonResult r;
  for (const auto& [site, expected] : truth) {
    SiteComparison sc;
    sc.callsite = site;
    sc.expected = expected;
    sc.computed = cg.targetsAt(site);
    for (const auto& t : sc.computed) {
      ++r.computedEdges;
      if (expected.count(t)) ++r.truePositives;
      else sc.spurious.insert(t);
    }
    for (const auto& t : expected) {
      ++r.expectedEdges;
      if (!sc.computed.count(t)) sc.missing.insert(t);
    }
    r.sites.push_back(std::move(sc));
  }
  return r;
}

struct EdgeCounts {
  std::size_t edges = 0;        // context-qualified
  std::size_t erasedEdges = 0;  // distinct (call site, target)
  std::size_t callsites = 0;

  nlohmann::json toJson() const {
    return {{"edges", edges}, {"erased_edges", erasedEdges}, {"callsites", callsites}};
  }
};

inline EdgeCounts edge_counts(const CallGraph& cg) {
  EdgeCounts c;
  c.edges = cg.size();
  c.erasedEdges = cg.erased().size();
  c.callsites = cg.callsites().size();
  return c;
}

}  // namespace minipta
