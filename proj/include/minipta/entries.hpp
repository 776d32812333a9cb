#pragma once

#include <string>
#include <vector>

#include "minipta/ir.hpp"

namespace minipta {

inline constexpr const char* kDummyMain = "DummyMain";

// [OP] collect_entries
//
// Synthesizes DummyMain: for every @Entry/@Component struct it allocates a
// fresh instance, invokes build, and invokes every UI event handler (the
// anonymous methods declared directly in build). Explicit entry names from
// configuration are invoked as well ("freeFunction" or "Class.method").
//
// Returns the qualified names of the entry methods DummyMain invokes.
inline std::vector<std::string> collect_entries(
    IRProgram& program, const std::vector<std::string>& explicitEntries = {}) {
  if (program.findMethod(kDummyMain))
    throw AnalysisError({Severity::Error, {}, "program already has a DummyMain"});

  MethodDecl dummy;
  dummy.qualifiedName = kDummyMain;
  dummy.name = kDummyMain;
  dummy.loc = {"<synthetic>", 0, 0};

  std::vector<std::string> entries;
  int receiverCount = 0;
  SourceLoc loc{"<synthetic>", 0, 0};

  auto emit = [&](IrKind k) -> IRStatement& {
    IRStatement s;
    s.kind = k;
    s.loc = loc;
    s.id = program.nextStatementId++;
    dummy.body.push_back(std::move(s));
    return dummy.body.back();
  };
  auto allocReceiver = [&](const std::string& className) {
    std::string recv = "_c" + std::to_string(receiverCount++);
    IRStatement& alloc = emit(IrKind::AllocObject);
    alloc.lhs = recv;
    alloc.typeName = className;
    dummy.localTypes[recv] = TypeRef{{className}};
    return recv;
  };

  for (const auto& c : program.classes) {
    if (!c.isEntry && !c.isComponent) continue;
    std::string recv = allocReceiver(c.name);
    const std::string buildQn = c.name + ".build";
    if (program.findMethod(buildQn)) {
      IRStatement& call = emit(IrKind::DynamicCall);
      call.base = recv;
      call.name = "build";
      entries.push_back(buildQn);
      // event handlers: anonymous methods declared directly in build
      for (const auto& m : program.methods) {
        if (m.isAnonymous && m.owner == c.name && m.lexicalParent == buildQn) {
          IRStatement& h = emit(IrKind::DynamicCall);
          h.base = recv;
          h.name = m.name;
          entries.push_back(m.qualifiedName);
        }
      }
    }
  }

  for (const auto& name : explicitEntries) {
    auto dot = name.find('.');
    if (dot == std::string::npos) {
      const MethodDecl* m = program.findMethod(name);
      if (!m)
        throw AnalysisError({Severity::Error, {}, "entry function '" + name + "' not found"});
      IRStatement& call = emit(IrKind::StaticCall);
      call.name = name;
      entries.push_back(name);
    } else {
      std::string className = name.substr(0, dot);
      std::string methodName = name.substr(dot + 1);
      if (!program.findClass(className) || !program.findMethod(name))
        throw AnalysisError({Severity::Error, {}, "entry method '" + name + "' not found"});
      std::string recv = allocReceiver(className);
      IRStatement& call = emit(IrKind::DynamicCall);
      call.base = recv;
      call.name = methodName;
      entries.push_back(name);
    }
  }

  if (entries.empty())
    throw AnalysisError({Severity::Error, {},
                         "no analysis entries found: no @Entry/@Component structs and no "
                         "explicit entries configured (pass --entry)"});

  program.methods.push_back(std::move(dummy));
  program.reindex();
  return entries;
}

}  // namespace minipta
