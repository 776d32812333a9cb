#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace minipta {

struct SourceLoc {
  std::string file;
  int line = 0;
  int column = 0;

  std::string str() const {
    std::ostringstream os;
    os << file << ":" << line << ":" << column;
    return os.str();
  }
  bool operator==(const SourceLoc&) const = default;
};

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceLoc loc;
  std::string message;

  std::string str() const {
    std::string s = loc.file.empty() ? "" : loc.str() + ": ";
    s += severity == Severity::Error ? "error: " : "warning: ";
    return s + message;
  }
};

// Fatal frontend failure (syntax error, unresolved symbol, bad config).
class AnalysisError : public std::runtime_error {
 public:
  explicit AnalysisError(const Diagnostic& d) : std::runtime_error(d.str()), diag(d) {}
  Diagnostic diag;
};

class TimeoutError : public std::runtime_error {
 public:
  explicit TimeoutError(double limitSeconds)
      : std::runtime_error([limitSeconds] {
          std::ostringstream os;
          os << "analysis exceeded timeout of " << limitSeconds << " s";
          return os.str();
        }()) {}
};

// Sink for non-fatal diagnostics accumulated across the pipeline.
class DiagnosticSink {
 public:
  void warn(const SourceLoc& loc, std::string msg) {
    add({Severity::Warning, loc, std::move(msg)});
  }
  void error(const SourceLoc& loc, std::string msg) {
    add({Severity::Error, loc, std::move(msg)});
  }
  void add(Diagnostic d) {
    if (verbose()) std::cerr << d.str() << "\n";
    diags_.push_back(std::move(d));
  }

  const std::vector<Diagnostic>& all() const { return diags_; }
  bool hasErrors() const {
    for (const auto& d : diags_)
      if (d.severity == Severity::Error) return true;
    return false;
  }
  std::size_t size() const { return diags_.size(); }

  static bool verbose() {
    static const bool v = [] {
      const char* e = std::getenv("MINIPTA_LOG");
      return e && *e && std::string(e) != "0";
    }();
    return v;
  }

 private:
  std::vector<Diagnostic> diags_;
};

}  // namespace minipta
