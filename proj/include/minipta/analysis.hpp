#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "minipta/baselines.hpp"
#include "minipta/desugar.hpp"
#include "minipta/entries.hpp"
#include "minipta/ir.hpp"
#include "minipta/parser.hpp"
#include "minipta/plugins.hpp"
#include "minipta/solver.hpp"

namespace minipta {

// End-to-end assembly of the pipeline: sources -> AST -> IR -> entries ->
// solver. Kept header-only and side-effect free; the CLI and tests both
// build on it.

struct AnalysisOptions {
  ContextSelector selector;
  double timeoutSeconds = 1200.0;
  std::set<std::string> disabledPlugins;       // "storage", "function", "sdk"
  std::optional<SdkDecls> sdk;
  std::vector<std::string> explicitEntries;    // "freeFunction" or "Class.method"
};

struct FrontendResult {
  IRProgram program;
  std::vector<std::string> entries;        // analysis roots (DummyMain)
  std::vector<std::string> entryMethods;   // what DummyMain invokes
};

// (path, text) pairs -> IR with DummyMain appended.
inline FrontendResult build_program(const std::vector<std::pair<std::string, std::string>>& sources,
                                    const AnalysisOptions& opts, DiagnosticSink& diags) {
  std::vector<SourceModule> modules;
  for (const auto& [path, text] : sources) {
    SourceModule m = parse_module(text, path);
    for (const auto& w : m.warnings) diags.add(w);
    modules.push_back(std::move(m));
  }
  DesugarOptions dopts;
  if (opts.sdk) dopts.externalSymbols = opts.sdk->globalSymbols();
  FrontendResult r;
  r.program = desugar(modules, dopts);
  r.entryMethods = collect_entries(r.program, opts.explicitEntries);
  r.entries = {std::string(kDummyMain)};
  return r;
}

inline AnalysisResult analyze_program(const IRProgram& program,
                                      const std::vector<std::string>& entries,
                                      const AnalysisOptions& opts, DiagnosticSink& diags) {
  SolverOptions sopts;
  sopts.selector = opts.selector;
  sopts.timeoutSeconds = opts.timeoutSeconds;
  Solver solver(program, sopts, diags, make_default_plugins(opts.disabledPlugins, opts.sdk));
  return solver.run(entries);
}

inline AnalysisResult analyze_sources(
    const std::vector<std::pair<std::string, std::string>>& sources, const AnalysisOptions& opts,
    DiagnosticSink& diags) {
  FrontendResult fr = build_program(sources, opts, diags);
  return analyze_program(fr.program, fr.entries, opts, diags);
}

}  // namespace minipta
