// minipta — context-sensitive pointer analysis and call-graph construction
// for the mini-ArkTS language.
//
// Subcommands:
//   analyze <files...>   run the analysis per input file, dump CG/PAG, print stats
//   ir dump <files...>   emit the desugared JSON IR
//   compare <files...>   precision/recall of pta/cha/rta against .truth.json sidecars
//
// Exit codes: 0 success, 1 analysis failed or produced only a partial result,
// 2 fatal (unreadable input, bad usage).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "minipta/analysis.hpp"
#include "minipta/metrics.hpp"
#include "minipta/printer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::vector<std::string> inputs;
  std::string context = "callsite";
  int k = 2;
  std::string algo = "pta";
  std::vector<std::string> entries;
  std::string sdkDecls;
  std::vector<std::string> disabledPlugins;
  double timeout = 1200.0;
  std::string format = "text";
};

void addCommonFlags(CLI::App* cmd, CommonOpts& o, bool analysisFlags) {
  cmd->add_option("inputs", o.inputs, "input .mats files")->required()->expected(-1);
  cmd->add_option("--sdk-decls", o.sdkDecls, "SDK declaration file");
  cmd->add_option("--entry", o.entries, "explicit entry (free function or Class.method)");
  if (analysisFlags) {
    cmd->add_option("--context", o.context, "context kind")
        ->check(CLI::IsMember({"insensitive", "callsite", "function"}))
        ->capture_default_str();
    cmd->add_option("--k", o.k, "context depth")
        ->check(CLI::Range(0, 5))
        ->capture_default_str();
    cmd->add_option("--timeout", o.timeout, "analysis timeout in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--disable-plugin", o.disabledPlugins, "disable a plugin")
        ->check(CLI::IsMember({"storage", "function", "sdk"}));
  }
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

std::optional<std::string> readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

// Peak RSS in kilobytes; an estimate from /proc, 0 when unavailable.
std::size_t peakRssKb() {
  std::ifstream f("/proc/self/status");
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream ss(line.substr(6));
      std::size_t kb = 0;
      ss >> kb;
      return kb;
    }
  }
  return 0;
}

minipta::AnalysisOptions toAnalysisOptions(const CommonOpts& o, minipta::DiagnosticSink& diags) {
  minipta::AnalysisOptions a;
  a.selector.kind = o.context == "insensitive" ? minipta::ContextKind::Insensitive
                  : o.context == "function"    ? minipta::ContextKind::FunctionK
                                               : minipta::ContextKind::CallsiteK;
  a.selector.k = o.k;
  a.timeoutSeconds = o.timeout;
  a.disabledPlugins.insert(o.disabledPlugins.begin(), o.disabledPlugins.end());
  a.explicitEntries = o.entries;
  if (!o.sdkDecls.empty()) a.sdk = minipta::load_sdk_decls(o.sdkDecls, diags);
  return a;
}

void printDiagnostics(const minipta::DiagnosticSink& diags) {
  for (const auto& d : diags.all()) {
    if (d.severity == minipta::Severity::Warning && !diags.verbose()) continue;
    std::cerr << d.str() << "\n";
  }
}

// Dump path for one program: with multiple inputs, "{}" in the pattern (or a
// suffix when absent) keeps the files apart.
std::string dumpPath(const std::string& pattern, const std::string& input, bool multi) {
  std::string stem = fs::path(input).stem().string();
  auto pos = pattern.find("{}");
  if (pos != std::string::npos)
    return pattern.substr(0, pos) + stem + pattern.substr(pos + 2);
  if (!multi) return pattern;
  return pattern + "." + stem;
}

struct AnalyzeExtra {
  std::string dumpCg;
  std::string dumpPag;
  std::string dumpPts;
};

int cmdAnalyze(const CommonOpts& o, const AnalyzeExtra& extra) {
  bool multi = o.inputs.size() > 1;
  int worst = 0;
  for (const std::string& input : o.inputs) {
    auto text = readFile(input);
    if (!text) {
      std::cerr << "error: cannot read '" << input << "'\n";
      return 2;
    }
    minipta::DiagnosticSink diags;
    try {
      minipta::AnalysisOptions opts = toAnalysisOptions(o, diags);
      minipta::FrontendResult fr = minipta::build_program({{input, *text}}, opts, diags);

      json stats;
      std::string cgDot, cgJson, pagDot, pagJson, ptsJson;
      if (o.algo == "pta") {
        minipta::AnalysisResult r =
            minipta::analyze_program(fr.program, fr.entries, opts, diags);
        stats = {{"nodes", r.stats.nodes},
                 {"edges", r.stats.edges},
                 {"cg_edges", r.stats.cgEdges},
                 {"iterations", r.stats.iterations},
                 {"time_ms", r.stats.timeMs},
                 {"peak_mem_estimate", peakRssKb() * 1024}};
        cgDot = r.cg.toDot();
        cgJson = r.cg.toJson().dump(2) + "\n";
        pagDot = minipta::emit_dot(r.pag, fr.program, r.ctxs);
        pagJson = minipta::pagToJson(r.pag, fr.program, r.ctxs).dump(2) + "\n";
        json pts(r.points_to);
        ptsJson = pts.dump(2) + "\n";
      } else {
        minipta::BaselineResult r = o.algo == "cha" ? minipta::run_cha(fr.program, fr.entries)
                                                    : minipta::run_rta(fr.program, fr.entries);
        stats = {{"nodes", 0},
                 {"edges", 0},
                 {"cg_edges", r.cg.size()},
                 {"iterations", r.iterations},
                 {"time_ms", r.timeMs},
                 {"peak_mem_estimate", peakRssKb() * 1024}};
        cgDot = r.cg.toDot();
        cgJson = r.cg.toJson().dump(2) + "\n";
      }
      stats["file"] = input;
      stats["algorithm"] = o.algo;

      auto dump = [&](const std::string& pattern, const std::string& dot,
                      const std::string& js) -> bool {
        if (pattern.empty()) return true;
        std::string path = dumpPath(pattern, input, multi);
        const std::string& content = fs::path(path).extension() == ".dot" ? dot : js;
        if (!writeFile(path, content)) {
          std::cerr << "error: cannot write '" << path << "'\n";
          return false;
        }
        return true;
      };
      if (!dump(extra.dumpCg, cgDot, cgJson)) return 2;
      if (!dump(extra.dumpPag, pagDot, pagJson)) return 2;
      if (!extra.dumpPts.empty() && o.algo == "pta") {
        std::string path = dumpPath(extra.dumpPts, input, multi);
        if (!writeFile(path, ptsJson)) {
          std::cerr << "error: cannot write '" << path << "'\n";
          return 2;
        }
      }

      if (o.format == "json") {
        std::cout << stats.dump() << "\n";
      } else {
        std::cout << input << " [" << o.algo << "]: nodes=" << stats["nodes"]
                  << " edges=" << stats["edges"] << " cg_edges=" << stats["cg_edges"]
                  << " iterations=" << stats["iterations"] << " time_ms=" << stats["time_ms"]
                  << "\n";
      }
      printDiagnostics(diags);
      if (diags.hasErrors()) worst = std::max(worst, 1);
    } catch (const minipta::TimeoutError& e) {
      printDiagnostics(diags);
      std::cerr << "error: " << input << ": " << e.what() << "\n";
      worst = std::max(worst, 1);
    } catch (const minipta::AnalysisError& e) {
      printDiagnostics(diags);
      std::cerr << "error: " << e.what() << "\n";
      worst = std::max(worst, 1);
    }
  }
  return worst;
}

int cmdIrDump(const CommonOpts& o) {
  for (const std::string& input : o.inputs) {
    auto text = readFile(input);
    if (!text) {
      std::cerr << "error: cannot read '" << input << "'\n";
      return 2;
    }
    minipta::DiagnosticSink diags;
    try {
      minipta::SourceModule mod = minipta::parse_module(*text, input);
      for (const auto& w : mod.warnings) diags.add(w);
      minipta::DesugarOptions dopts;
      if (!o.sdkDecls.empty())
        dopts.externalSymbols = minipta::load_sdk_decls(o.sdkDecls, diags).globalSymbols();
      std::vector<minipta::SourceModule> mods;
      mods.push_back(std::move(mod));
      minipta::IRProgram prog = minipta::desugar(mods, dopts);
      std::cout << minipta::irjson::programToJson(prog).dump(2) << "\n";
      printDiagnostics(diags);
    } catch (const minipta::AnalysisError& e) {
      printDiagnostics(diags);
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}

int cmdCompare(const CommonOpts& o) {
  int worst = 0;
  json report = json::array();
  struct Tot {
    std::size_t pta = 0, cha = 0, rta = 0;
  } totals;

  if (o.format == "text")
    std::cout << "program                algo  precision  recall   cg_edges  erased\n";

  for (const std::string& input : o.inputs) {
    auto text = readFile(input);
    if (!text) {
      std::cerr << "error: cannot read '" << input << "'\n";
      return 2;
    }
    fs::path sidecar = fs::path(input);
    sidecar.replace_extension(".truth.json");
    auto truthText = readFile(sidecar.string());
    if (!truthText) {
      std::cerr << "warning: no ground-truth sidecar for '" << input << "', skipping\n";
      worst = std::max(worst, 1);
      continue;
    }

    minipta::DiagnosticSink diags;
    try {
      minipta::GroundTruth truth =
          minipta::ground_truth_from_json(json::parse(*truthText));
      minipta::AnalysisOptions opts = toAnalysisOptions(o, diags);
      minipta::FrontendResult fr = minipta::build_program({{input, *text}}, opts, diags);

      minipta::AnalysisResult pta =
          minipta::analyze_program(fr.program, fr.entries, opts, diags);
      minipta::BaselineResult cha = minipta::run_cha(fr.program, fr.entries);
      minipta::BaselineResult rta = minipta::run_rta(fr.program, fr.entries);

      totals.pta += pta.cg.erased().size();
      totals.cha += cha.cg.erased().size();
      totals.rta += rta.cg.erased().size();

      auto row = [&](const char* algo, const minipta::CallGraph& cg) {
        minipta::ComparisonResult c = minipta::compare(cg, truth);
        minipta::EdgeCounts ec = minipta::edge_counts(cg);
        if (o.format == "json") {
          json j = c.toJson();
          j["file"] = input;
          j["algorithm"] = algo;
          j["edge_counts"] = ec.toJson();
          report.push_back(std::move(j));
        } else {
          char buf[160];
          std::snprintf(buf, sizeof buf, "%-22s %-5s %8.1f%% %7.1f%% %9zu %7zu",
                        fs::path(input).filename().string().c_str(), algo,
                        c.precision() * 100.0, c.recall() * 100.0, ec.edges, ec.erasedEdges);
          std::cout << buf << "\n";
        }
      };
      row("pta", pta.cg);
      row("cha", cha.cg);
      row("rta", rta.cg);
      printDiagnostics(diags);
    } catch (const minipta::AnalysisError& e) {
      printDiagnostics(diags);
      std::cerr << "error: " << input << ": " << e.what() << "\n";
      worst = std::max(worst, 1);
    }
  }

  auto delta = [](std::size_t from, std::size_t to) {
    return from == 0 ? 0.0 : 100.0 * ((double)from - (double)to) / (double)from;
  };
  if (o.format == "json") {
    json out = {{"programs", report},
                {"aggregate",
                 {{"pta_erased_edges", totals.pta},
                  {"cha_erased_edges", totals.cha},
                  {"rta_erased_edges", totals.rta},
                  {"pta_vs_cha_reduction_pct", delta(totals.cha, totals.pta)},
                  {"pta_vs_rta_increase_pct", -delta(totals.rta, totals.pta)}}}};
    std::cout << out.dump(2) << "\n";
  } else {
    double vsCha = delta(totals.cha, totals.pta);
    double vsRta = -delta(totals.rta, totals.pta);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "aggregate: pta=%zu cha=%zu rta=%zu edges; pta %.1f%% %s cha, %.1f%% %s rta",
                  totals.pta, totals.cha, totals.rta, std::fabs(vsCha),
                  vsCha >= 0 ? "below" : "above", std::fabs(vsRta),
                  vsRta >= 0 ? "above" : "below");
    std::cout << buf << "\n";
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"context-sensitive pointer analysis for mini-ArkTS"};
  app.require_subcommand(1);

  CommonOpts analyzeOpts;
  AnalyzeExtra extra;
  CLI::App* analyze = app.add_subcommand("analyze", "run the analysis");
  addCommonFlags(analyze, analyzeOpts, true);
  analyze->add_option("--algo", analyzeOpts.algo, "call-graph algorithm")
      ->check(CLI::IsMember({"pta", "cha", "rta"}))
      ->capture_default_str();
  analyze->add_option("--dump-cg", extra.dumpCg, "write the call graph (.dot or JSON)");
  analyze->add_option("--dump-pag", extra.dumpPag, "write the PAG (.dot or JSON)");
  analyze->add_option("--dump-pts", extra.dumpPts, "write per-node points-to sets (JSON)");

  CommonOpts irOpts;
  CLI::App* ir = app.add_subcommand("ir", "IR utilities");
  CLI::App* irDump = ir->add_subcommand("dump", "emit the desugared IR as JSON");
  addCommonFlags(irDump, irOpts, false);
  ir->require_subcommand(1);

  CommonOpts compareOpts;
  CLI::App* cmp =
      app.add_subcommand("compare", "evaluate pta/cha/rta against ground-truth sidecars");
  addCommonFlags(cmp, compareOpts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (analyze->parsed()) return cmdAnalyze(analyzeOpts, extra);
    if (ir->parsed()) return cmdIrDump(irOpts);
    if (cmp->parsed()) return cmdCompare(compareOpts);
  } catch (const minipta::AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
