#include <doctest.h>

#include <string>
#include <vector>

#include "minipta/pag.hpp"

using namespace minipta;

TEST_CASE("object registry is idempotent per canonical key") {
  Pag pag;
  ObjId a = pag.getOrCreateObject("obj@3", ObjKind::ClassInstance, "A", 3, {"f", 1, 1});
  ObjId b = pag.getOrCreateObject("obj@3", ObjKind::ClassInstance, "A", 3, {"f", 1, 1});
  ObjId c = pag.getOrCreateObject("obj@4", ObjKind::ClassInstance, "A", 4, {"f", 2, 1});
  CHECK(a == b);
  CHECK(a != c);
  CHECK(pag.objectCount() == 2);
  CHECK(pag.object(a).key == "obj@3");
  // later creations with the same key never overwrite the original metadata
  ObjId d = pag.getOrCreateObject("obj@3", ObjKind::SdkStub, "Other", 9, {"g", 9, 9});
  CHECK(d == a);
  CHECK(pag.object(a).typeName == "A");
}

TEST_CASE("allocation keys encode site, heap context and function-ness") {
  CHECK(Pag::allocKey(7, kEmptyCtx, false) == "obj@7");
  CHECK(Pag::allocKey(7, kEmptyCtx, true) == "fn@7");
  CHECK(Pag::allocKey(7, 3, false) == "obj@7#3");
}

TEST_CASE("var and field nodes are stable get-or-create") {
  Pag pag;
  NodeId v1 = pag.nodeForVar("x", 0, kEmptyCtx);
  NodeId v2 = pag.nodeForVar("x", 0, kEmptyCtx);
  NodeId v3 = pag.nodeForVar("x", 0, 1);   // same local, different context
  NodeId v4 = pag.nodeForVar("x", 1, kEmptyCtx);  // same local, different method
  CHECK(v1 == v2);
  CHECK(v1 != v3);
  CHECK(v1 != v4);
  CHECK(pag.lookupVar("x", 0, kEmptyCtx) == v1);
  CHECK_FALSE(pag.lookupVar("y", 0, kEmptyCtx).has_value());

  ObjId o = pag.getOrCreateObject("obj@0", ObjKind::ClassInstance, "A", 0, {});
  ObjId p = pag.getOrCreateObject("obj@1", ObjKind::ClassInstance, "A", 1, {});
  NodeId f1 = pag.nodeForField(o, "f");
  NodeId f2 = pag.nodeForField(o, "f");
  NodeId f3 = pag.nodeForField(p, "f");  // fields of distinct objects never alias
  CHECK(f1 == f2);
  CHECK(f1 != f3);
}

TEST_CASE("edges deduplicate and self-edges are rejected") {
  Pag pag;
  NodeId a = pag.nodeForVar("a", 0, kEmptyCtx);
  NodeId b = pag.nodeForVar("b", 0, kEmptyCtx);
  CHECK(pag.addEdge(a, b, EdgeLabel::Copy));
  CHECK_FALSE(pag.addEdge(a, b, EdgeLabel::Copy));
  CHECK_FALSE(pag.addEdge(a, a, EdgeLabel::Copy));
  CHECK(pag.edgeCount() == 1);
  CHECK(pag.successors(a) == std::vector<NodeId>{b});
}

TEST_CASE("addPts returns the strict delta only") {
  Pag pag;
  NodeId a = pag.nodeForVar("a", 0, kEmptyCtx);
  ObjId o1 = pag.getOrCreateObject("obj@1", ObjKind::ClassInstance, "A", 1, {});
  ObjId o2 = pag.getOrCreateObject("obj@2", ObjKind::ClassInstance, "A", 2, {});
  CHECK(pag.addPts(a, {o1, o2}) == std::vector<ObjId>{o1, o2});
  CHECK(pag.addPts(a, {o1}) == std::vector<ObjId>{});
  CHECK(pag.addPts(a, {o1, o2}) == std::vector<ObjId>{});
  CHECK(pag.pts(a).size() == 2);
  CHECK(pag.peakPtsSize() == 2);
}

TEST_CASE("merging nodes unions their sets and redirects lookups") {
  Pag pag;
  NodeId a = pag.nodeForVar("a", 0, kEmptyCtx);
  NodeId b = pag.nodeForVar("b", 0, kEmptyCtx);
  NodeId c = pag.nodeForVar("c", 0, kEmptyCtx);
  ObjId o1 = pag.getOrCreateObject("obj@1", ObjKind::ClassInstance, "A", 1, {});
  ObjId o2 = pag.getOrCreateObject("obj@2", ObjKind::ClassInstance, "A", 2, {});
  pag.addPts(a, {o1});
  pag.addPts(b, {o2});
  pag.addEdge(b, c, EdgeLabel::Copy);

  std::vector<ObjId> delta = pag.merge(a, b);
  CHECK(delta == std::vector<ObjId>{o2});
  CHECK(pag.find(b) == pag.find(a));
  // both names now read the merged set
  CHECK(pag.pts(a).size() == 2);
  CHECK(pag.pts(b).size() == 2);
  // b's successors survive through the representative
  CHECK(pag.successors(a) == std::vector<NodeId>{c});
  // edges inside one equivalence class are rejected
  CHECK_FALSE(pag.addEdge(a, b, EdgeLabel::Copy));
  // re-merging is a no-op
  CHECK(pag.merge(a, b).empty());
}

TEST_CASE("DOT and JSON exports are deterministic") {
  auto build = [] {
    Pag pag;
    ObjId o = pag.getOrCreateObject("obj@1", ObjKind::ClassInstance, "A", 1, {});
    NodeId a = pag.nodeForVar("a", -1, kEmptyCtx);
    NodeId b = pag.nodeForVar("b", -1, kEmptyCtx);
    pag.addPts(a, {o});
    pag.addEdge(a, b, EdgeLabel::ParamBinding);
    return pag;
  };
  IRProgram empty;
  ContextInterner ctxs;
  Pag p1 = build(), p2 = build();
  CHECK(emit_dot(p1, empty, ctxs) == emit_dot(p2, empty, ctxs));
  CHECK(pagToJson(p1, empty, ctxs) == pagToJson(p2, empty, ctxs));
  std::string dot = emit_dot(p1, empty, ctxs);
  CHECK(dot.find("doublecircle") != std::string::npos);
  CHECK(dot.find("param") != std::string::npos);
}

TEST_CASE("node labels name variables, contexts, fields and storage cells") {
  Pag pag;
  IRProgram prog;
  MethodDecl m;
  m.qualifiedName = "C.run";
  prog.methods.push_back(m);
  prog.reindex();
  ContextInterner ctxs;
  CtxId ctx = ctxs.intern({4, 9});

  NodeId v = pag.nodeForVar("x", 0, ctx);
  CHECK(nodeLabel(pag, prog, ctxs, pag.nodes()[v]) == "C.run::x[4,9]");

  ObjId o = pag.getOrCreateObject("obj@1", ObjKind::ClassInstance, "A", 1, {});
  NodeId f = pag.nodeForField(o, "fld");
  CHECK(nodeLabel(pag, prog, ctxs, pag.nodes()[f]) == "obj@1.fld");

  ObjId cell = pag.getOrCreateObject("cell:AppStorage:k", ObjKind::StorageCell,
                                     "AppStorage.k", -1, {});
  NodeId cv = pag.nodeForField(cell, "value");
  CHECK(nodeLabel(pag, prog, ctxs, pag.nodes()[cv]) == "AppStorage.k");
}
