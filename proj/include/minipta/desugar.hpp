#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "minipta/ast.hpp"
#include "minipta/ir.hpp"

namespace minipta {

struct DesugarOptions {
  // Global symbols that may appear as call/receiver bases without a local
  // declaration (SDK modules, framework singletons). AppStorage is always known.
  std::set<std::string> externalSymbols;
};

// Lowers parsed modules into the normalized three-address IR.
//
// Every expression is decomposed into atomic statements over fresh temps,
// lambdas are hoisted into named anonymous methods, chained field accesses
// become load chains, and control flow is flattened (the analysis is
// flow-insensitive, so all branches are kept in order).
class Desugarer {
 public:
  static IRProgram run(const std::vector<SourceModule>& modules,
                       const DesugarOptions& opts = {}) {
    Desugarer d(opts);
    return d.lower(modules);
  }

 private:
  DesugarOptions opts_;
  IRProgram prog_;
  int anonCounter_ = 0;

  std::map<std::string, std::string> functionsByName_;  // simple or NS-qualified -> qualified
  std::set<std::string> namespaces_;

  explicit Desugarer(DesugarOptions opts) : opts_(std::move(opts)) {
    opts_.externalSymbols.insert("AppStorage");
  }

  [[noreturn]] static void err(const SourceLoc& loc, const std::string& msg) {
    throw AnalysisError({Severity::Error, loc, msg});
  }

  bool isExternal(const std::string& n) const { return opts_.externalSymbols.count(n) > 0; }

  // Per-method lowering state.
  struct Scope {
    MethodDecl* method = nullptr;
    Desugarer* owner = nullptr;
    int tempCounter = 0;
    std::set<std::string> locals;    // params, this, declared locals, temps
    std::set<std::string> reserved;  // every name the body will declare
    bool hasThis = false;

    std::string freshTemp(const TypeRef& t) {
      std::string n;
      do {
        n = "_t" + std::to_string(tempCounter++);
      } while (locals.count(n) || reserved.count(n));  // dodge locals spelled like temps
      locals.insert(n);
      if (!t.empty()) method->localTypes[n] = t;
      return n;
    }
    void declare(const std::string& n, const TypeRef& t, const SourceLoc&) {
      locals.insert(n);
      if (!t.empty()) method->localTypes[n] = t;
    }
    bool isDeclared(const std::string& n) const {
      return locals.count(n) > 0 || (n == "this" && hasThis) || n == "globalThis";
    }
    TypeRef typeOf(const std::string& n) const { return method->typeOfLocal(n); }

    IRStatement& emit(IrKind k, const SourceLoc& loc) {
      IRStatement s;
      s.kind = k;
      s.loc = loc;
      s.id = owner->prog_.nextStatementId++;
      method->body.push_back(std::move(s));
      return method->body.back();
    }
  };

  // -------------------------------------------------------------------------
  // Declaration collection
  // -------------------------------------------------------------------------

  IRProgram lower(const std::vector<SourceModule>& modules) {
    for (const auto& m : modules) prog_.modulePaths.push_back(m.path);

    // pass 1: signatures
    for (const auto& m : modules)
      for (const auto& d : m.declarations) collectDecl(d, "");
    prog_.reindex();

    // pass 2: bodies
    for (const auto& m : modules)
      for (const auto& d : m.declarations) lowerDecl(d, "");

    injectStorageRegistrations();
    prog_.reindex();
    return prog_;
  }

  void collectDecl(const Decl& d, const std::string& ns) {
    if (d.ns) {
      if (!namespaces_.insert(d.ns->name).second)
        err(d.ns->loc, "duplicate namespace '" + d.ns->name + "'");
      for (const auto& inner : d.ns->decls) collectDecl(inner, d.ns->name);
      return;
    }
    if (d.function) {
      const MethodAst& fn = d.function->fn;
      std::string qn = ns.empty() ? fn.name : ns + "." + fn.name;
      if (functionsByName_.count(qn)) err(fn.loc, "duplicate function '" + qn + "'");
      functionsByName_[qn] = qn;
      MethodDecl md;
      md.qualifiedName = qn;
      md.name = fn.name;
      md.params = fn.params;
      md.returnType = fn.returnType;
      md.loc = fn.loc;
      prog_.methods.push_back(std::move(md));
      return;
    }
    const ClassAst& c = *d.klass;
    if (prog_.classIndex.count(c.name) ||
        std::any_of(prog_.classes.begin(), prog_.classes.end(),
                    [&](const ClassDecl& x) { return x.name == c.name; }))
      err(c.loc, "duplicate class '" + c.name + "'");
    ClassDecl cd;
    cd.name = c.name;
    cd.superclass = c.superclass;
    cd.isStruct = c.isStruct;
    cd.loc = c.loc;
    for (const auto& deco : c.decorators) {
      if (deco.name == "Component") cd.isComponent = true;
      if (deco.name == "Entry") cd.isEntry = true;
    }
    std::set<std::string> fieldNames;
    for (const auto& f : c.fields) {
      if (!fieldNames.insert(f.name).second)
        err(f.loc, "duplicate field '" + f.name + "' in class '" + c.name + "'");
      FieldDecl fd;
      fd.name = f.name;
      fd.type = f.type;
      fd.loc = f.loc;
      for (const auto& deco : f.decorators) {
        if (deco.name == "StorageProp" || deco.name == "StorageLink") {
          if (deco.arg.empty()) err(deco.loc, "@" + deco.name + " requires a string key");
          fd.storage = deco.name == "StorageLink" ? StorageBinding::Link : StorageBinding::Prop;
          fd.storageKey = deco.arg;
        }
      }
      cd.fields.push_back(std::move(fd));
    }
    std::set<std::string> methodNames;
    for (const auto& m : c.methods) {
      if (!methodNames.insert(m.name).second)
        err(m.loc, "duplicate method '" + m.name + "' in class '" + c.name + "'");
      MethodDecl md;
      md.qualifiedName = c.name + "." + m.name;
      md.name = m.name;
      md.owner = c.name;
      md.isStatic = m.isStatic;
      md.isConstructor = m.isConstructor;
      md.params = m.params;
      md.returnType = m.returnType;
      md.loc = m.loc;
      cd.methods.push_back(md.qualifiedName);
      prog_.methods.push_back(std::move(md));
    }
    prog_.classes.push_back(std::move(cd));
  }

  // -------------------------------------------------------------------------
  // Body lowering
  // -------------------------------------------------------------------------

  void lowerDecl(const Decl& d, const std::string& ns) {
    if (d.ns) {
      for (const auto& inner : d.ns->decls) lowerDecl(inner, d.ns->name);
      return;
    }
    if (d.function) {
      const MethodAst& fn = d.function->fn;
      std::string qn = ns.empty() ? fn.name : ns + "." + fn.name;
      lowerBody(qn, fn.params, fn.body, /*hasThis=*/false);
      return;
    }
    const ClassAst& c = *d.klass;
    // field initializers run in the constructor; synthesize one when needed
    bool needCtor = false;
    for (const auto& f : c.fields)
      if (f.init) needCtor = true;
    bool hasCtor =
        std::any_of(c.methods.begin(), c.methods.end(), [](const MethodAst& m) {
          return m.isConstructor;
        });
    if ((needCtor || classDeclOf(c.name)->hasStorageBindings()) && !hasCtor)
      synthesizeConstructor(c.name, c.loc);

    for (const auto& m : c.methods) {
      std::string qn = c.name + "." + m.name;
      lowerBody(qn, m.params, m.body, /*hasThis=*/!m.isStatic);
      if (m.isConstructor) lowerFieldInits(c, qn);
    }
    if (!hasCtor && (needCtor || classDeclOf(c.name)->hasStorageBindings()))
      lowerFieldInits(c, c.name + ".constructor");
  }

  ClassDecl* classDeclOf(const std::string& name) {
    for (auto& cd : prog_.classes)
      if (cd.name == name) return &cd;
    return nullptr;
  }
  MethodDecl* methodDeclOf(const std::string& qn) {
    for (auto& m : prog_.methods)
      if (m.qualifiedName == qn) return &m;
    return nullptr;
  }

  void synthesizeConstructor(const std::string& className, const SourceLoc& loc) {
    MethodDecl md;
    md.qualifiedName = className + ".constructor";
    md.name = "constructor";
    md.owner = className;
    md.isConstructor = true;
    md.loc = loc;
    classDeclOf(className)->methods.push_back(md.qualifiedName);
    prog_.methods.push_back(std::move(md));
  }

  void lowerFieldInits(const ClassAst& c, const std::string& ctorQn) {
    MethodDecl* ctor = methodDeclOf(ctorQn);
    Scope sc = openScope(ctor, true);
    for (const auto& f : c.fields) {
      if (!f.init) continue;
      Operand v = lowerExpr(sc, *f.init);
      IRStatement& s = sc.emit(IrKind::FieldStore, f.loc);
      s.base = "this";
      s.name = f.name;
      s.value = v;
    }
  }

  Scope openScope(MethodDecl* md, bool hasThis) {
    Scope sc;
    sc.method = md;
    sc.owner = this;
    sc.hasThis = hasThis;
    if (hasThis) {
      sc.locals.insert("this");
      if (!md->owner.empty()) md->localTypes["this"] = TypeRef{{md->owner}};
    }
    for (const auto& p : md->params) {
      sc.locals.insert(p.name);
      if (!p.type.empty()) md->localTypes[p.name] = p.type;
    }
    std::set<std::string> seen;
    for (const auto& p : md->params)
      if (!seen.insert(p.name).second)
        err(md->loc, "duplicate parameter '" + p.name + "' in " + md->qualifiedName);
    return sc;
  }

  void lowerBody(const std::string& qn, const std::vector<Param>&,
                 const std::vector<StmtPtr>& body, bool hasThis) {
    MethodDecl* md = methodDeclOf(qn);
    Scope sc = openScope(md, hasThis);
    for (const auto& s : body) reserveNames(sc, *s);
    for (const auto& s : body) lowerStmt(sc, *s);
  }

  static void reserveNames(Scope& sc, const Stmt& s) {
    if (s.kind == StmtKind::VarDecl) sc.reserved.insert(s.name);
    for (const auto& b : s.body) reserveNames(sc, *b);
    for (const auto& b : s.elseBody) reserveNames(sc, *b);
  }

  void lowerStmt(Scope& sc, const Stmt& s) {
    switch (s.kind) {
      case StmtKind::VarDecl: {
        sc.declare(s.name, s.declaredType, s.loc);
        if (s.value) lowerExprInto(sc, *s.value, s.name, s.declaredType);
        break;
      }
      case StmtKind::Assign: {
        const Expr& t = *s.target;
        if (t.kind == ExprKind::Ident) {
          if (!sc.isDeclared(t.text))
            err(t.loc, "assignment to undeclared identifier '" + t.text + "'");
          lowerExprInto(sc, *s.value, t.text, sc.typeOf(t.text));
        } else if (t.kind == ExprKind::FieldAccess) {
          std::string base = lowerToLocal(sc, *t.base);
          Operand v = lowerExpr(sc, *s.value);
          IRStatement& st = sc.emit(IrKind::FieldStore, s.loc);
          st.base = base;
          st.name = t.text;
          st.value = v;
        } else if (t.kind == ExprKind::Index) {
          std::string base = lowerToLocal(sc, *t.base);
          lowerExpr(sc, *t.index);
          Operand v = lowerExpr(sc, *s.value);
          IRStatement& st = sc.emit(IrKind::FieldStore, s.loc);
          st.base = base;
          st.name = "elem";
          st.value = v;
        } else {
          err(t.loc, "invalid assignment target");
        }
        break;
      }
      case StmtKind::ExprStmt:
        lowerExpr(sc, *s.value, /*discard=*/true);
        break;
      case StmtKind::Return: {
        IRStatement* st;
        if (s.value) {
          Operand v = lowerExpr(sc, *s.value);
          st = &sc.emit(IrKind::Return, s.loc);
          st->value = v;
        } else {
          st = &sc.emit(IrKind::Return, s.loc);
        }
        break;
      }
      case StmtKind::If:
        if (s.value) lowerExpr(sc, *s.value, true);
        for (const auto& b : s.body) lowerStmt(sc, *b);
        for (const auto& b : s.elseBody) lowerStmt(sc, *b);
        break;
      case StmtKind::While:
      case StmtKind::For:
        if (s.value) lowerExpr(sc, *s.value, true);
        for (const auto& b : s.body) lowerStmt(sc, *b);
        break;
      case StmtKind::Block:
        for (const auto& b : s.body) lowerStmt(sc, *b);
        break;
    }
  }

  // -------------------------------------------------------------------------
  // Expression lowering
  // -------------------------------------------------------------------------

  Operand lowerExpr(Scope& sc, const Expr& e, bool discard = false) {
    switch (e.kind) {
      case ExprKind::Ident: {
        if (sc.isDeclared(e.text)) return Operand::local(e.text);
        // reference to a named function creates a function object
        auto fit = resolveFunction(e.text);
        if (!fit.empty()) {
          std::string t = sc.freshTemp(TypeRef{{"Function"}});
          IRStatement& st = sc.emit(IrKind::AllocFunction, e.loc);
          st.lhs = t;
          st.typeName = fit;
          return Operand::local(t);
        }
        err(e.loc, "reference to undeclared identifier '" + e.text + "'");
      }
      case ExprKind::This:
        if (!sc.hasThis) err(e.loc, "'this' used outside of a method");
        return Operand::local("this");
      case ExprKind::StringLit: return {Operand::StringLit, e.text};
      case ExprKind::NumberLit: return {Operand::NumberLit, e.text};
      case ExprKind::BoolLit: return {Operand::BoolLit, e.text};
      case ExprKind::NullLit: return {Operand::NullLit, e.text};
      case ExprKind::Binary:
        lowerExpr(sc, *e.base, true);
        lowerExpr(sc, *e.index, true);
        return {Operand::NumberLit, "0"};
      case ExprKind::FieldAccess:
      case ExprKind::Index:
      case ExprKind::New:
      case ExprKind::Lambda:
      case ExprKind::Call:
      case ExprKind::ArrayLit: {
        if (discard && e.kind == ExprKind::Call) {
          emitCall(sc, e, "");
          return Operand::none();
        }
        std::string t = sc.freshTemp(TypeRef{});
        lowerExprInto(sc, e, t, TypeRef{});
        return Operand::local(t);
      }
    }
    return Operand::none();
  }

  std::string lowerToLocal(Scope& sc, const Expr& e) {
    Operand o = lowerExpr(sc, e);
    if (!o.isLocal()) err(e.loc, "expression cannot be used as a reference base");
    return o.text;
  }

  // Lowers `e` so that its value ends up in local `lhs`.
  void lowerExprInto(Scope& sc, const Expr& e, const std::string& lhs,
                     const TypeRef& declared) {
    switch (e.kind) {
      case ExprKind::New: {
        std::vector<Operand> args;
        for (const auto& a : e.args) args.push_back(lowerExpr(sc, *a));
        IRStatement& st = sc.emit(IrKind::AllocObject, e.loc);
        st.lhs = lhs;
        st.typeName = e.text;
        st.args = std::move(args);
        noteType(sc, lhs, declared, TypeRef{{e.text}});
        return;
      }
      case ExprKind::Lambda: {
        std::string anonQn = hoistLambda(sc, e);
        IRStatement& st = sc.emit(IrKind::AllocFunction, e.loc);
        st.lhs = lhs;
        st.typeName = anonQn;
        noteType(sc, lhs, declared, TypeRef{{"Function"}});
        return;
      }
      case ExprKind::ArrayLit: {
        IRStatement& st = sc.emit(IrKind::AllocObject, e.loc);
        st.lhs = lhs;
        st.typeName = "Array";
        noteType(sc, lhs, declared, TypeRef{{"Array"}});
        for (const auto& el : e.args) {
          Operand v = lowerExpr(sc, *el);
          IRStatement& store = sc.emit(IrKind::FieldStore, el->loc);
          store.base = lhs;
          store.name = "elem";
          store.value = v;
        }
        return;
      }
      case ExprKind::FieldAccess: {
        // namespace function reference: NS.f
        if (e.base->kind == ExprKind::Ident && namespaces_.count(e.base->text)) {
          std::string qn = resolveFunction(e.base->text + "." + e.text);
          if (qn.empty())
            err(e.loc, "unknown function '" + e.base->text + "." + e.text + "'");
          IRStatement& st = sc.emit(IrKind::AllocFunction, e.loc);
          st.lhs = lhs;
          st.typeName = qn;
          noteType(sc, lhs, declared, TypeRef{{"Function"}});
          return;
        }
        std::string base = lowerToLocal(sc, *e.base);
        IRStatement& st = sc.emit(IrKind::FieldLoad, e.loc);
        st.lhs = lhs;
        st.base = base;
        st.name = e.text;
        noteType(sc, lhs, declared, fieldTypeOf(sc.typeOf(base), e.text));
        return;
      }
      case ExprKind::Index: {
        std::string base = lowerToLocal(sc, *e.base);
        lowerExpr(sc, *e.index);
        IRStatement& st = sc.emit(IrKind::FieldLoad, e.loc);
        st.lhs = lhs;
        st.base = base;
        st.name = "elem";
        noteType(sc, lhs, declared, TypeRef{});
        return;
      }
      case ExprKind::Call: {
        emitCall(sc, e, lhs, declared);
        return;
      }
      default: {
        Operand v = lowerExpr(sc, e);
        IRStatement& st = sc.emit(IrKind::Assign, e.loc);
        st.lhs = lhs;
        st.value = v;
        if (v.isLocal()) noteType(sc, lhs, declared, sc.typeOf(v.text));
        else noteType(sc, lhs, declared, literalType(v));
        return;
      }
    }
  }

  static TypeRef literalType(const Operand& o) {
    switch (o.kind) {
      case Operand::StringLit: return TypeRef{{"string"}};
      case Operand::NumberLit: return TypeRef{{"number"}};
      case Operand::BoolLit: return TypeRef{{"boolean"}};
      default: return TypeRef{};
    }
  }

  void noteType(Scope& sc, const std::string& lhs, const TypeRef& declared,
                const TypeRef& inferred) {
    if (lhs.empty()) return;
    if (!declared.empty())
      sc.method->localTypes[lhs] = declared;
    else if (!inferred.empty() && !sc.method->localTypes.count(lhs))
      sc.method->localTypes[lhs] = inferred;
  }

  TypeRef fieldTypeOf(const TypeRef& baseType, const std::string& field) const {
    if (baseType.members.size() != 1) return {};
    const ClassDecl* c = nullptr;
    for (const auto& cd : prog_.classes)
      if (cd.name == baseType.primary()) c = &cd;
    while (c) {
      if (const FieldDecl* f = c->field(field)) return f->type;
      c = c->superclass.empty() ? nullptr : [&]() -> const ClassDecl* {
        for (const auto& cd : prog_.classes)
          if (cd.name == c->superclass) return &cd;
        return nullptr;
      }();
    }
    return {};
  }

  bool classHasMethod(const std::string& className, const std::string& method) const {
    const ClassDecl* c = nullptr;
    for (const auto& cd : prog_.classes)
      if (cd.name == className) c = &cd;
    while (c) {
      for (const auto& qn : c->methods)
        if (qn == c->name + "." + method) return true;
      const std::string super = c->superclass;
      c = nullptr;
      if (!super.empty())
        for (const auto& cd : prog_.classes)
          if (cd.name == super) c = &cd;
    }
    return false;
  }

  bool classHasField(const std::string& className, const std::string& field) const {
    return fieldTypeOf(TypeRef{{className}}, field).empty()
               ? [&] {
                   const ClassDecl* c = nullptr;
                   for (const auto& cd : prog_.classes)
                     if (cd.name == className) c = &cd;
                   while (c) {
                     if (c->field(field)) return true;
                     const std::string super = c->superclass;
                     c = nullptr;
                     if (!super.empty())
                       for (const auto& cd : prog_.classes)
                         if (cd.name == super) c = &cd;
                   }
                   return false;
                 }()
               : true;
  }

  std::string resolveFunction(const std::string& name) const {
    auto it = functionsByName_.find(name);
    return it == functionsByName_.end() ? "" : it->second;
  }

  bool isClassName(const std::string& n) const {
    for (const auto& c : prog_.classes)
      if (c.name == n) return true;
    return false;
  }

  // -------------------------------------------------------------------------
  // Calls
  // -------------------------------------------------------------------------

  void emitCall(Scope& sc, const Expr& call, const std::string& lhs,
                const TypeRef& declared = {}) {
    const Expr& callee = *call.base;
    std::vector<Operand> args;
    auto lowerArgs = [&] {
      for (const auto& a : call.args) args.push_back(lowerExpr(sc, *a));
    };

    if (callee.kind == ExprKind::Ident) {
      const std::string& n = callee.text;
      if (sc.isDeclared(n)) {
        lowerArgs();
        IRStatement& st = sc.emit(IrKind::FunctionPointerCall, call.loc);
        st.lhs = lhs;
        st.base = n;
        st.args = std::move(args);
        noteType(sc, lhs, declared, TypeRef{});
        return;
      }
      std::string qn = resolveFunction(n);
      if (!qn.empty()) {
        lowerArgs();
        IRStatement& st = sc.emit(IrKind::StaticCall, call.loc);
        st.lhs = lhs;
        st.name = qn;
        st.args = std::move(args);
        if (!lhs.empty())
          noteType(sc, lhs, declared, methodReturnType(qn));
        return;
      }
      if (isExternal(n)) {
        // bare SDK call, e.g. Button('A')
        lowerArgs();
        IRStatement& st = sc.emit(IrKind::DynamicCall, call.loc);
        st.lhs = lhs;
        st.baseIsGlobal = true;
        st.name = n;
        st.args = std::move(args);
        noteType(sc, lhs, declared, TypeRef{});
        return;
      }
      err(callee.loc, "call to undeclared function '" + n + "'");
    }

    if (callee.kind == ExprKind::FieldAccess) {
      const Expr& baseExpr = *callee.base;
      const std::string& method = callee.text;

      if (baseExpr.kind == ExprKind::Ident && !sc.isDeclared(baseExpr.text)) {
        const std::string& sym = baseExpr.text;
        if (namespaces_.count(sym)) {
          std::string qn = resolveFunction(sym + "." + method);
          if (qn.empty()) err(callee.loc, "unknown function '" + sym + "." + method + "'");
          lowerArgs();
          IRStatement& st = sc.emit(IrKind::StaticCall, call.loc);
          st.lhs = lhs;
          st.name = qn;
          st.args = std::move(args);
          if (!lhs.empty()) noteType(sc, lhs, declared, methodReturnType(qn));
          return;
        }
        if (isClassName(sym)) {
          // static method call Class.m()
          const MethodDecl* m = prog_.findMethod(sym + "." + method);
          if (!m) {
            // reindex may be stale during lowering; search directly
            for (const auto& md : prog_.methods)
              if (md.qualifiedName == sym + "." + method) m = &md;
          }
          if (!m || !m->isStatic)
            err(callee.loc, "no static method '" + method + "' on class '" + sym + "'");
          lowerArgs();
          IRStatement& st = sc.emit(IrKind::StaticCall, call.loc);
          st.lhs = lhs;
          st.name = sym + "." + method;
          st.args = std::move(args);
          if (!lhs.empty()) noteType(sc, lhs, declared, m->returnType);
          return;
        }
        if (isExternal(sym)) {
          lowerArgs();
          IRStatement& st = sc.emit(IrKind::DynamicCall, call.loc);
          st.lhs = lhs;
          st.base = sym;
          st.baseIsGlobal = true;
          st.name = method;
          st.args = std::move(args);
          noteType(sc, lhs, declared, TypeRef{});
          return;
        }
        err(baseExpr.loc, "reference to undeclared identifier '" + sym + "'");
      }

      // receiver is an expression; decide method call vs function-valued field
      std::string base = lowerToLocal(sc, baseExpr);
      TypeRef bt = sc.typeOf(base);
      bool fieldFn = false;
      if (base == "globalThis") {
        fieldFn = true;
      } else if (bt.members.size() == 1 && isClassName(bt.primary())) {
        if (!classHasMethod(bt.primary(), method) && classHasField(bt.primary(), method))
          fieldFn = true;
      }
      if (fieldFn) {
        std::string t = sc.freshTemp(fieldTypeOf(bt, method));
        IRStatement& ld = sc.emit(IrKind::FieldLoad, callee.loc);
        ld.lhs = t;
        ld.base = base;
        ld.name = method;
        lowerArgs();
        IRStatement& st = sc.emit(IrKind::FunctionPointerCall, call.loc);
        st.lhs = lhs;
        st.base = t;
        st.args = std::move(args);
        noteType(sc, lhs, declared, TypeRef{});
        return;
      }
      lowerArgs();
      IRStatement& st = sc.emit(IrKind::DynamicCall, call.loc);
      st.lhs = lhs;
      st.base = base;
      st.name = method;
      st.args = std::move(args);
      if (!lhs.empty() && bt.members.size() == 1)
        noteType(sc, lhs, declared, methodReturnType(bt.primary() + "." + method));
      return;
    }

    // anything else evaluates to a function value
    std::string fn = lowerToLocal(sc, callee);
    lowerArgs();
    IRStatement& st = sc.emit(IrKind::FunctionPointerCall, call.loc);
    st.lhs = lhs;
    st.base = fn;
    st.args = std::move(args);
    noteType(sc, lhs, declared, TypeRef{});
  }

  TypeRef methodReturnType(const std::string& qn) const {
    for (const auto& m : prog_.methods)
      if (m.qualifiedName == qn) return m.returnType;
    return {};
  }

  // -------------------------------------------------------------------------
  // Lambda hoisting
  // -------------------------------------------------------------------------

  std::string hoistLambda(Scope& enclosing, const Expr& lambda) {
    std::string name = "anonymous_method_" + std::to_string(++anonCounter_);
    const std::string& owner = enclosing.method->owner;
    std::string qn = owner.empty() ? name : owner + "." + name;

    MethodDecl md;
    md.qualifiedName = qn;
    md.name = name;
    md.owner = owner;
    md.isAnonymous = true;
    md.lexicalParent = enclosing.method->qualifiedName;
    md.params = lambda.params;
    md.returnType = lambda.returnType;
    md.loc = lambda.loc;
    if (!owner.empty()) classDeclOf(owner)->methods.push_back(qn);
    prog_.methods.push_back(std::move(md));
    MethodDecl* mdp = &prog_.methods.back();  // deque: stable across nested hoists

    Scope sc = openScope(mdp, /*hasThis=*/!owner.empty() && enclosing.hasThis);
    if (lambda.lambdaExpr) {
      Operand v = lowerExpr(sc, *lambda.lambdaExpr);
      IRStatement& s = sc.emit(IrKind::Return, lambda.lambdaExpr->loc);
      s.value = v;
    } else {
      for (const auto& st : lambda.lambdaBody) reserveNames(sc, *st);
      for (const auto& st : lambda.lambdaBody) lowerStmt(sc, *st);
    }
    return qn;
  }

  // -------------------------------------------------------------------------
  // Storage decorator registrations
  // -------------------------------------------------------------------------

  // @StorageProp/@StorageLink fields register against the store when the
  // owning object is constructed; the statements land in the constructor and
  // are claimed by the Storage plugin.
  void injectStorageRegistrations() {
    for (auto& cd : prog_.classes) {
      if (!cd.hasStorageBindings()) continue;
      MethodDecl* ctor = nullptr;
      for (auto& m : prog_.methods)
        if (m.qualifiedName == cd.name + ".constructor") ctor = &m;
      if (!ctor) {
        synthesizeConstructor(cd.name, cd.loc);
        ctor = &prog_.methods.back();
      }
      std::vector<IRStatement> regs;
      for (const auto& f : cd.fields) {
        if (f.storage == StorageBinding::None) continue;
        IRStatement s;
        s.kind = IrKind::DynamicCall;
        s.loc = f.loc;
        s.id = prog_.nextStatementId++;
        s.base = "this";
        s.name = f.storage == StorageBinding::Link ? "__storageLink" : "__storageProp";
        s.args = {{Operand::StringLit, f.storageKey}, {Operand::StringLit, f.name}};
        regs.push_back(std::move(s));
      }
      ctor->body.insert(ctor->body.begin(), std::make_move_iterator(regs.begin()),
                        std::make_move_iterator(regs.end()));
    }
  }
};

// [OP] desugar
inline IRProgram desugar(const std::vector<SourceModule>& modules,
                         const DesugarOptions& opts = {}) {
  return Desugarer::run(modules, opts);
}

}  // namespace minipta
