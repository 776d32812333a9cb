#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minipta/diagnostics.hpp"

namespace minipta {

// Declared type: a union of member type names. Single-member for plain types.
struct TypeRef {
  std::vector<std::string> members;

  bool empty() const { return members.empty(); }
  const std::string& primary() const {
    static const std::string unknown = "";
    return members.empty() ? unknown : members.front();
  }
  static bool isPrimitiveName(const std::string& n) {
    return n == "number" || n == "string" || n == "boolean" || n == "void";
  }
  // Primitive-typed values carry no pointers; unknown types are treated as references.
  bool isPrimitive() const {
    if (members.empty()) return false;
    for (const auto& m : members)
      if (!isPrimitiveName(m)) return false;
    return true;
  }
  std::string str() const {
    if (members.empty()) return "";
    if (members.size() == 1) return members.front();
    std::string s = "(";
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i) s += "|";
      s += members[i];
    }
    return s + ")";
  }
};

struct Param {
  std::string name;
  TypeRef type;
};

struct Decorator {
  std::string name;   // Component, Entry, StorageProp, StorageLink, ...
  std::string arg;    // string argument, e.g. the storage key
  SourceLoc loc;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class ExprKind {
  Ident,        // x
  This,         // this
  StringLit,
  NumberLit,
  BoolLit,
  NullLit,
  FieldAccess,  // base.name
  Index,        // base[expr]
  New,          // new T(args)
  Lambda,       // (params) => expr | block
  Call,         // callee(args); callee is Ident/FieldAccess/any expr
  ArrayLit,     // [e, e]
  Binary,       // e + e (string/number concatenation; pointer-irrelevant)
};

struct Expr {
  ExprKind kind;
  SourceLoc loc;

  std::string text;             // Ident name / literal text / FieldAccess field / New type
  ExprPtr base;                 // FieldAccess, Index, Call callee, Binary lhs
  ExprPtr index;                // Index subscript, Binary rhs
  std::vector<ExprPtr> args;    // New/Call args, ArrayLit elements
  // Lambda
  std::vector<Param> params;
  TypeRef returnType;
  ExprPtr lambdaExpr;           // expression-bodied lambda
  std::vector<StmtPtr> lambdaBody;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind {
  VarDecl,    // let/const name: type = init
  Assign,     // target = value (target: Ident/FieldAccess/Index)
  ExprStmt,   // bare expression (normally a call)
  Return,
  If,         // flattened by desugaring: all branches kept
  While,
  For,
  Block,
};

struct Stmt {
  StmtKind kind;
  SourceLoc loc;

  std::string name;        // VarDecl variable name
  TypeRef declaredType;    // VarDecl annotation
  ExprPtr target;          // Assign lhs
  ExprPtr value;           // VarDecl init / Assign rhs / ExprStmt / Return / If-While cond
  std::vector<StmtPtr> body;      // If-then / While / For / Block
  std::vector<StmtPtr> elseBody;  // If-else
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct MethodAst {
  std::string name;
  std::vector<Param> params;
  TypeRef returnType;
  std::vector<StmtPtr> body;
  bool isStatic = false;
  bool isConstructor = false;
  SourceLoc loc;
};

struct FieldAst {
  std::string name;
  TypeRef type;
  std::vector<Decorator> decorators;
  ExprPtr init;
  SourceLoc loc;
};

struct ClassAst {
  std::string name;
  std::string superclass;  // empty when none
  bool isStruct = false;
  std::vector<Decorator> decorators;
  std::vector<FieldAst> fields;
  std::vector<MethodAst> methods;
  SourceLoc loc;
};

struct FunctionAst {
  MethodAst fn;
};

struct NamespaceAst;

struct Decl {
  // exactly one of these is set
  std::unique_ptr<FunctionAst> function;
  std::unique_ptr<ClassAst> klass;
  std::unique_ptr<NamespaceAst> ns;
};

struct NamespaceAst {
  std::string name;
  std::vector<Decl> decls;
  SourceLoc loc;
};

// One parsed source file.
struct SourceModule {
  std::string path;
  std::vector<Decl> declarations;
  std::vector<Diagnostic> warnings;  // e.g. unknown decorators
};

}  // namespace minipta
