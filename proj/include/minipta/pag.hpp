#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minipta/context.hpp"
#include "minipta/ir.hpp"

namespace minipta {

using ObjId = int;
using NodeId = int;

enum class ObjKind { ClassInstance, StructInstance, FunctionObject, SdkStub, StorageCell };

inline const char* objKindName(ObjKind k) {
  switch (k) {
    case ObjKind::ClassInstance: return "class-instance";
    case ObjKind::StructInstance: return "struct-instance";
    case ObjKind::FunctionObject: return "function-object";
    case ObjKind::SdkStub: return "sdk-stub";
    case ObjKind::StorageCell: return "storage-cell";
  }
  return "?";
}

// Abstract heap object. `key` is the canonical identity string derived from
// the allocation site (plus heap context / clone provenance); the object
// registry is idempotent per key.
struct HeapObject {
  ObjId id = -1;
  ObjKind kind = ObjKind::ClassInstance;
  std::string typeName;
  std::string key;
  int siteStmt = -1;
  SourceLoc loc;
  CtxId heapCtx = kEmptyCtx;

  // FunctionObject only
  std::string funcRef;                   // qualified name of the method it executes
  std::optional<NodeId> boundThis;       // explicit binding injected by the Function plugin
  std::vector<NodeId> boundArgs;
  std::set<NodeId> capturedThis;         // lexical `this` of the allocating activations
};

enum class EdgeLabel { Copy, StorageBackflow, ThisBinding, ParamBinding, ReturnBinding };

inline const char* edgeLabelName(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::Copy: return "copy";
    case EdgeLabel::StorageBackflow: return "storage-backflow";
    case EdgeLabel::ThisBinding: return "this";
    case EdgeLabel::ParamBinding: return "param";
    case EdgeLabel::ReturnBinding: return "return";
  }
  return "?";
}

struct ConstraintEdge {
  NodeId src;
  NodeId dst;
  EdgeLabel label;
};

// P = V ∪ (O × F): a node is either a context-qualified variable pointer or a
// field pointer of one abstract heap object. Field pointers carry no context;
// the object itself is the identity.
struct PagNode {
  NodeId id = -1;
  bool isField = false;
  // var pointer
  std::string local;
  int methodId = -1;
  CtxId ctx = kEmptyCtx;
  // field pointer
  ObjId obj = -1;
  std::string field;

  std::set<ObjId> pts;
  std::vector<NodeId> out;  // successor reps may be stale; resolve through find()
};

class Pag {
 public:
  // [OP] alloc_heap_object — idempotent per canonical key.
  ObjId getOrCreateObject(const std::string& key, ObjKind kind, const std::string& typeName,
                          int siteStmt, const SourceLoc& loc, CtxId heapCtx = kEmptyCtx,
                          const std::string& funcRef = "") {
    auto it = objectsByKey_.find(key);
    if (it != objectsByKey_.end()) return it->second;
    HeapObject o;
    o.id = static_cast<ObjId>(objects_.size());
    o.kind = kind;
    o.typeName = typeName;
    o.key = key;
    o.siteStmt = siteStmt;
    o.loc = loc;
    o.heapCtx = heapCtx;
    o.funcRef = funcRef;
    objects_.push_back(std::move(o));
    objectsByKey_[key] = objects_.back().id;
    return objects_.back().id;
  }

  static std::string allocKey(int siteStmt, CtxId heapCtx, bool function) {
    std::string k = (function ? "fn@" : "obj@") + std::to_string(siteStmt);
    if (heapCtx != kEmptyCtx) k += "#" + std::to_string(heapCtx);
    return k;
  }

  const HeapObject& object(ObjId id) const { return objects_[id]; }
  HeapObject& object(ObjId id) { return objects_[id]; }
  std::size_t objectCount() const { return objects_.size(); }

  // [OP] node_for_var — get-or-create, stable id per (local, method, context).
  NodeId nodeForVar(const std::string& local, int methodId, CtxId ctx) {
    auto k = std::tuple(local, methodId, ctx);
    auto it = varNodes_.find(k);
    if (it != varNodes_.end()) return it->second;
    NodeId id = newNode();
    nodes_[id].local = local;
    nodes_[id].methodId = methodId;
    nodes_[id].ctx = ctx;
    varNodes_[k] = id;
    return id;
  }

  // [OP] node_for_field — fields of distinct heap objects never alias.
  NodeId nodeForField(ObjId obj, const std::string& field) {
    auto k = std::pair(obj, field);
    auto it = fieldNodes_.find(k);
    if (it != fieldNodes_.end()) return it->second;
    NodeId id = newNode();
    nodes_[id].isField = true;
    nodes_[id].obj = obj;
    nodes_[id].field = field;
    fieldNodes_[k] = id;
    return id;
  }

  std::optional<NodeId> lookupVar(const std::string& local, int methodId, CtxId ctx) const {
    auto it = varNodes_.find(std::tuple(local, methodId, ctx));
    if (it == varNodes_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<NodeId> lookupField(ObjId obj, const std::string& field) const {
    auto it = fieldNodes_.find(std::pair(obj, field));
    if (it == fieldNodes_.end()) return std::nullopt;
    return it->second;
  }

  // [OP] add_edge — set semantics; returns whether the edge is new. The
  // caller (solver) owes dst a propagation of pts(src).
  bool addEdge(NodeId src, NodeId dst, EdgeLabel label) {
    if (find(src) == find(dst)) return false;
    if (!edgeSet_.insert({src, dst}).second) return false;
    edges_.push_back({src, dst, label});
    nodes_[find(src)].out.push_back(dst);
    return true;
  }

  // Adds objects to pts(node); returns only the strictly new ones.
  std::vector<ObjId> addPts(NodeId node, const std::vector<ObjId>& objs) {
    PagNode& n = nodes_[find(node)];
    std::vector<ObjId> delta;
    for (ObjId o : objs)
      if (n.pts.insert(o).second) delta.push_back(o);
    if (!delta.empty()) {
      std::size_t sz = n.pts.size();
      if (sz > peakPtsSize_) peakPtsSize_ = sz;
    }
    return delta;
  }

  const std::set<ObjId>& pts(NodeId node) const { return nodes_[find(node)].pts; }

  // Successor reps of a node, deduplicated, deterministic order.
  std::vector<NodeId> successors(NodeId node) const {
    std::set<NodeId> reps;
    for (NodeId d : nodes_[find(node)].out) reps.insert(find(d));
    reps.erase(find(node));
    return {reps.begin(), reps.end()};
  }

  // --- cycle collapsing (optional optimization) ----------------------------

  NodeId find(NodeId n) const {
    while (rep_[n] != n) n = rep_[n];
    return n;
  }

  // Merges `other` into `target`'s equivalence class; returns the new pts
  // delta that target gained (the caller must re-propagate it).
  std::vector<ObjId> merge(NodeId target, NodeId other) {
    target = find(target);
    other = find(other);
    if (target == other) return {};
    PagNode& t = nodes_[target];
    PagNode& o = nodes_[other];
    std::vector<ObjId> delta;
    for (ObjId id : o.pts)
      if (t.pts.insert(id).second) delta.push_back(id);
    t.out.insert(t.out.end(), o.out.begin(), o.out.end());
    o.out.clear();
    o.pts.clear();
    rep_[other] = target;
    return delta;
  }

  std::size_t nodeCount() const { return nodes_.size(); }
  std::size_t edgeCount() const { return edges_.size(); }
  std::size_t peakPtsSize() const { return peakPtsSize_; }
  const std::vector<ConstraintEdge>& edges() const { return edges_; }
  const std::vector<PagNode>& nodes() const { return nodes_; }
  const std::vector<HeapObject>& objects() const { return objects_; }

 private:
  std::vector<PagNode> nodes_;
  std::vector<HeapObject> objects_;
  std::map<std::string, ObjId> objectsByKey_;
  std::vector<ConstraintEdge> edges_;
  std::set<std::pair<NodeId, NodeId>> edgeSet_;
  std::map<std::tuple<std::string, int, CtxId>, NodeId> varNodes_;
  std::map<std::pair<ObjId, std::string>, NodeId> fieldNodes_;
  std::vector<NodeId> rep_;
  std::size_t peakPtsSize_ = 0;

  NodeId newNode() {
    NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({});
    nodes_.back().id = id;
    rep_.push_back(id);
    return id;
  }
};

// ---------------------------------------------------------------------------
// Labels and export
// ---------------------------------------------------------------------------

inline std::string nodeLabel(const Pag& pag, const IRProgram& prog,
                             const ContextInterner& ctxs, const PagNode& n) {
  if (n.isField) {
    const HeapObject& o = pag.object(n.obj);
    // storage cells read as Instance.key in diagrams
    if (o.kind == ObjKind::StorageCell && n.field == "value") return o.typeName;
    return o.key + "." + n.field;
  }
  std::string m = n.methodId >= 0 && n.methodId < (int)prog.methods.size()
                      ? prog.methods[n.methodId].qualifiedName
                      : "<global>";
  std::string s = m + "::" + n.local;
  if (n.ctx != kEmptyCtx) s += ctxs.str(n.ctx);
  return s;
}

// [OP] emit_dot — deterministic ordering; heap objects double-circled.
inline std::string emit_dot(const Pag& pag, const IRProgram& prog, const ContextInterner& ctxs) {
  std::ostringstream os;
  os << "digraph pag {\n  rankdir=LR;\n";
  for (const HeapObject& o : pag.objects()) {
    os << "  o" << o.id << " [shape=doublecircle,label=\"" << o.key;
    if (!o.typeName.empty()) os << ":" << o.typeName;
    os << "\"];\n";
  }
  for (const PagNode& n : pag.nodes()) {
    if (pag.find(n.id) != n.id && n.pts.empty() && n.out.empty()) {
      // merged-away member: still print, pointing at its class contents
    }
    os << "  n" << n.id << " [shape=ellipse,label=\"" << nodeLabel(pag, prog, ctxs, n)
       << "\"];\n";
  }
  // object membership (pts) as dashed edges, constraint edges solid
  for (const PagNode& n : pag.nodes()) {
    if (pag.find(n.id) != n.id) continue;
    for (ObjId o : n.pts) os << "  o" << o << " -> n" << n.id << " [style=dashed];\n";
  }
  for (const ConstraintEdge& e : pag.edges())
    os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << edgeLabelName(e.label)
       << "\"];\n";
  os << "}\n";
  return os.str();
}

inline nlohmann::json pagToJson(const Pag& pag, const IRProgram& prog,
                                const ContextInterner& ctxs) {
  nlohmann::json objs = nlohmann::json::array();
  for (const HeapObject& o : pag.objects())
    objs.push_back({{"id", o.id},
                    {"key", o.key},
                    {"kind", objKindName(o.kind)},
                    {"type", o.typeName},
                    {"site", o.siteStmt}});
  nlohmann::json nodes = nlohmann::json::array();
  for (const PagNode& n : pag.nodes()) {
    nlohmann::json pts = nlohmann::json::array();
    for (ObjId o : pag.pts(n.id)) pts.push_back(pag.object(o).key);
    nodes.push_back({{"id", n.id},
                     {"kind", n.isField ? "field" : "var"},
                     {"label", nodeLabel(pag, prog, ctxs, n)},
                     {"pts", pts}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const ConstraintEdge& e : pag.edges())
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"label", edgeLabelName(e.label)}});
  return {{"objects", objs}, {"nodes", nodes}, {"edges", edges}};
}

}  // namespace minipta
