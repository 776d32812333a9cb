#pragma once

// Shared helpers for tests that analyze the checked-in corpus programs.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "minipta/analysis.hpp"

#ifndef CORPUS_DIR
#error "CORPUS_DIR must be defined by the build"
#endif

namespace testsupport {

inline std::string corpusPath(const std::string& name) {
  return std::string(CORPUS_DIR) + "/" + name;
}

inline std::string readFile(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every corpus program except the pathological timeout exerciser.
inline const std::vector<std::string>& corpusPrograms() {
  static const std::vector<std::string> progs{
      "writer_reader",     "storage_sync",    "basic_assign", "fields",
      "calls_static", "inherit", "closures",     "recursion",
      "globalthis",   "context_id", "sdk",       "bindcall",
      "storage_dynamic_key", "localstorage", "namespaces", "arrays_apply",
      "rta_closure"};
  return progs;
}

inline minipta::SdkDecls corpusSdk() {
  minipta::DiagnosticSink sink;
  return minipta::load_sdk_decls(corpusPath("sdk.decls"), sink);
}

struct Analyzed {
  minipta::FrontendResult frontend;
  minipta::AnalysisResult result;
  minipta::DiagnosticSink diags;
};

inline Analyzed analyzeCorpus(const std::string& name, minipta::AnalysisOptions opts = {}) {
  Analyzed a;
  if (!opts.sdk) opts.sdk = corpusSdk();
  std::string path = corpusPath(name + ".mats");
  a.frontend = minipta::build_program({{path, readFile(path)}}, opts, a.diags);
  a.result = minipta::analyze_program(a.frontend.program, a.frontend.entries, opts, a.diags);
  return a;
}

inline Analyzed analyzeText(const std::string& text, minipta::AnalysisOptions opts = {}) {
  Analyzed a;
  a.frontend = minipta::build_program({{"<test>", text}}, opts, a.diags);
  a.result = minipta::analyze_program(a.frontend.program, a.frontend.entries, opts, a.diags);
  return a;
}

// pts set for a deterministic node label, from the result's golden map.
inline std::vector<std::string> ptsOf(const minipta::AnalysisResult& r,
                                      const std::string& label) {
  auto it = r.points_to.find(label);
  return it == r.points_to.end() ? std::vector<std::string>{} : it->second;
}

}  // namespace testsupport
