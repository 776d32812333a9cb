#pragma once

#include <memory>
#include <string>
#include <vector>

#include "minipta/ast.hpp"
#include "minipta/lexer.hpp"

namespace minipta {

// Recursive-descent parser for mini-ArkTS (.mats).
//
// Control-flow statements (if/while/for) are accepted and kept in the AST;
// desugaring flattens their bodies into the statement stream because the
// analysis is flow-insensitive.
class Parser {
 public:
  static SourceModule parse(const std::string& sourceText, const std::string& path) {
    Parser p(sourceText, path);
    return p.parseModule();
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string path_;
  std::vector<Diagnostic> warnings_;

  Parser(const std::string& text, const std::string& path) : path_(path) {
    toks_ = Lexer(text, path).tokenize();
  }

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t ahead = 1) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return cur().kind == k; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }
  Token expect(Tok k, const char* context) {
    if (!at(k)) {
      throw AnalysisError({Severity::Error, cur().loc,
                           std::string("syntax error in ") + context + ": expected " + tokName(k) +
                               ", found " + tokName(cur().kind) +
                               (cur().text.empty() ? "" : " '" + cur().text + "'")});
    }
    return take();
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw AnalysisError({Severity::Error, cur().loc, "syntax error: " + msg});
  }

  // -------------------------------------------------------------------------

  SourceModule parseModule() {
    SourceModule m;
    m.path = path_;
    while (!at(Tok::Eof)) m.declarations.push_back(parseDecl());
    m.warnings = std::move(warnings_);
    return m;
  }

  Decl parseDecl() {
    std::vector<Decorator> decos = parseDecorators();
    Decl d;
    if (at(Tok::KwFunction)) {
      if (!decos.empty())
        warnings_.push_back({Severity::Warning, decos.front().loc,
                             "decorators on functions are ignored"});
      d.function = std::make_unique<FunctionAst>();
      d.function->fn = parseFunction();
    } else if (at(Tok::KwClass) || at(Tok::KwStruct)) {
      d.klass = std::make_unique<ClassAst>(parseClass(std::move(decos)));
    } else if (at(Tok::KwNamespace)) {
      if (!decos.empty())
        warnings_.push_back({Severity::Warning, decos.front().loc,
                             "decorators on namespaces are ignored"});
      d.ns = std::make_unique<NamespaceAst>(parseNamespace());
    } else {
      fail("expected function, class, struct or namespace declaration");
    }
    return d;
  }

  std::vector<Decorator> parseDecorators() {
    std::vector<Decorator> out;
    while (at(Tok::At)) {
      SourceLoc loc = take().loc;
      Token name = expect(Tok::Ident, "decorator");
      Decorator deco{name.text, "", loc};
      if (accept(Tok::LParen)) {
        if (at(Tok::String))
          deco.arg = take().text;
        else if (!at(Tok::RParen))
          fail("decorator argument must be a string literal");
        expect(Tok::RParen, "decorator");
      }
      if (deco.name != "Component" && deco.name != "Entry" && deco.name != "StorageProp" &&
          deco.name != "StorageLink") {
        warnings_.push_back(
            {Severity::Warning, loc, "unknown decorator '@" + deco.name + "' ignored"});
      }
      out.push_back(std::move(deco));
    }
    return out;
  }

  NamespaceAst parseNamespace() {
    NamespaceAst ns;
    ns.loc = expect(Tok::KwNamespace, "namespace").loc;
    ns.name = expect(Tok::Ident, "namespace").text;
    expect(Tok::LBrace, "namespace");
    while (!at(Tok::RBrace)) ns.decls.push_back(parseDecl());
    expect(Tok::RBrace, "namespace");
    return ns;
  }

  MethodAst parseFunction() {
    MethodAst fn;
    fn.loc = expect(Tok::KwFunction, "function").loc;
    fn.name = expect(Tok::Ident, "function").text;
    fn.params = parseParams();
    if (accept(Tok::Colon)) fn.returnType = parseType();
    fn.body = parseBlock();
    return fn;
  }

  ClassAst parseClass(std::vector<Decorator> decos) {
    ClassAst c;
    c.decorators = std::move(decos);
    c.isStruct = at(Tok::KwStruct);
    c.loc = take().loc;  // class | struct
    c.name = expect(Tok::Ident, "class").text;
    if (accept(Tok::KwExtends)) c.superclass = expect(Tok::Ident, "extends clause").text;
    expect(Tok::LBrace, "class body");
    while (!at(Tok::RBrace)) parseMember(c);
    expect(Tok::RBrace, "class body");
    return c;
  }

  void parseMember(ClassAst& c) {
    std::vector<Decorator> decos = parseDecorators();
    if (at(Tok::KwConstructor)) {
      MethodAst m;
      m.loc = take().loc;
      m.name = "constructor";
      m.isConstructor = true;
      m.params = parseParams();
      m.body = parseBlock();
      c.methods.push_back(std::move(m));
      return;
    }
    bool isStatic = accept(Tok::KwStatic);
    Token name = expect(Tok::Ident, "class member");
    if (at(Tok::LParen)) {
      MethodAst m;
      m.loc = name.loc;
      m.name = name.text;
      m.isStatic = isStatic;
      m.params = parseParams();
      if (accept(Tok::Colon)) m.returnType = parseType();
      m.body = parseBlock();
      if (!decos.empty())
        warnings_.push_back(
            {Severity::Warning, name.loc, "decorators on methods are ignored"});
      c.methods.push_back(std::move(m));
    } else {
      FieldAst f;
      f.loc = name.loc;
      f.name = name.text;
      f.decorators = std::move(decos);
      if (accept(Tok::Colon)) f.type = parseType();
      if (accept(Tok::Assign)) f.init = parseExpr();
      accept(Tok::Semicolon);
    c.fields.push_back(std::move(f));
    }
  }

  std::vector<Param> parseParams() {
    expect(Tok::LParen, "parameter list");
    std::vector<Param> out;
    while (!at(Tok::RParen)) {
      Param p;
      p.name = expect(Tok::Ident, "parameter").text;
      if (accept(Tok::Colon)) p.type = parseType();
      out.push_back(std::move(p));
      if (!accept(Tok::Comma)) break;
    }
    expect(Tok::RParen, "parameter list");
    return out;
  }

  TypeRef parseType() {
    TypeRef t;
    if (accept(Tok::LParen)) {
      // union type (a|b|...) or function type () => t
      if (at(Tok::RParen)) {
        take();
        expect(Tok::Arrow, "function type");
        parseType();  // result type, not tracked
        t.members.push_back("Function");
        return t;
      }
      t.members.push_back(parseTypeName());
      while (accept(Tok::Pipe)) t.members.push_back(parseTypeName());
      expect(Tok::RParen, "union type");
      return t;
    }
    t.members.push_back(parseTypeName());
    return t;
  }

  std::string parseTypeName() {
    std::string n = expect(Tok::Ident, "type").text;
    if (accept(Tok::Less)) {  // generic argument, erased: Array<T>
      parseTypeName();
      // '>' is not a lexer token of its own; reuse Ident guard
      fail("generic types are not supported");
    }
    while (accept(Tok::Dot)) n += "." + expect(Tok::Ident, "type").text;
    if (accept(Tok::LBracket)) {
      expect(Tok::RBracket, "array type");
      n = "Array";
    }
    return n;
  }

  // -------------------------------------------------------------------------
  // Statements
  // -------------------------------------------------------------------------

  std::vector<StmtPtr> parseBlock() {
    expect(Tok::LBrace, "block");
    std::vector<StmtPtr> out;
    while (!at(Tok::RBrace)) out.push_back(parseStmt());
    expect(Tok::RBrace, "block");
    return out;
  }

  StmtPtr parseStmt() {
    SourceLoc loc = cur().loc;
    if (at(Tok::KwLet) || at(Tok::KwConst)) return parseVarDecl();
    if (at(Tok::KwReturn)) {
      take();
      auto s = std::make_unique<Stmt>();
      s->kind = StmtKind::Return;
      s->loc = loc;
      if (!at(Tok::Semicolon) && !at(Tok::RBrace)) s->value = parseExpr();
      accept(Tok::Semicolon);
      return s;
    }
    if (at(Tok::KwIf)) return parseIf();
    if (at(Tok::KwWhile)) {
      take();
      auto s = std::make_unique<Stmt>();
      s->kind = StmtKind::While;
      s->loc = loc;
      expect(Tok::LParen, "while");
      s->value = parseExpr();
      expect(Tok::RParen, "while");
      s->body = parseStmtOrBlock();
      return s;
    }
    if (at(Tok::KwFor)) return parseFor();
    if (at(Tok::LBrace)) {
      auto s = std::make_unique<Stmt>();
      s->kind = StmtKind::Block;
      s->loc = loc;
      s->body = parseBlock();
      return s;
    }

    // assignment or expression statement
    ExprPtr e = parseExpr();
    auto s = std::make_unique<Stmt>();
    s->loc = loc;
    if (accept(Tok::Assign)) {
      s->kind = StmtKind::Assign;
      s->target = std::move(e);
      s->value = parseExpr();
    } else {
      s->kind = StmtKind::ExprStmt;
      s->value = std::move(e);
    }
    accept(Tok::Semicolon);
    return s;
  }

  StmtPtr parseVarDecl() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::VarDecl;
    s->loc = take().loc;  // let | const
    s->name = expect(Tok::Ident, "variable declaration").text;
    if (accept(Tok::Colon)) s->declaredType = parseType();
    if (accept(Tok::Assign)) s->value = parseExpr();
    accept(Tok::Semicolon);
    return s;
  }

  StmtPtr parseIf() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::If;
    s->loc = take().loc;
    expect(Tok::LParen, "if");
    s->value = parseExpr();
    expect(Tok::RParen, "if");
    s->body = parseStmtOrBlock();
    if (accept(Tok::KwElse)) s->elseBody = parseStmtOrBlock();
    return s;
  }

  StmtPtr parseFor() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::For;
    s->loc = take().loc;
    expect(Tok::LParen, "for");
    if (!at(Tok::Semicolon)) s->body.push_back(parseStmt());
    accept(Tok::Semicolon);
    if (!at(Tok::Semicolon)) s->value = parseExpr();
    expect(Tok::Semicolon, "for");
    StmtPtr step;
    if (!at(Tok::RParen)) {
      ExprPtr e = parseExpr();
      step = std::make_unique<Stmt>();
      step->loc = s->loc;
      if (accept(Tok::Assign)) {
        step->kind = StmtKind::Assign;
        step->target = std::move(e);
        step->value = parseExpr();
      } else {
        step->kind = StmtKind::ExprStmt;
        step->value = std::move(e);
      }
    }
    expect(Tok::RParen, "for");
    for (auto& st : parseStmtOrBlock()) s->body.push_back(std::move(st));
    if (step) s->body.push_back(std::move(step));
    return s;
  }

  std::vector<StmtPtr> parseStmtOrBlock() {
    if (at(Tok::LBrace)) return parseBlock();
    std::vector<StmtPtr> out;
    out.push_back(parseStmt());
    return out;
  }

  // -------------------------------------------------------------------------
  // Expressions
  // -------------------------------------------------------------------------

  ExprPtr parseExpr() {
    if (isLambdaStart()) return parseLambda();
    ExprPtr lhs = parsePostfix();
    while (at(Tok::Plus) || at(Tok::Less)) {  // concat / comparison, pointer-irrelevant
      SourceLoc loc = take().loc;
      ExprPtr rhs = isLambdaStart() ? parseLambda() : parsePostfix();
      auto bin = std::make_unique<Expr>();
      bin->kind = ExprKind::Binary;
      bin->loc = loc;
      bin->base = std::move(lhs);
      bin->index = std::move(rhs);
      lhs = std::move(bin);
    }
    return lhs;
  }

  // '(' ... ')' '=>' — distinguish a lambda head from a parenthesized expression.
  bool isLambdaStart() const {
    if (!at(Tok::LParen)) return false;
    std::size_t i = pos_ + 1;
    int depth = 1;
    while (i < toks_.size() && depth > 0) {
      Tok k = toks_[i].kind;
      if (k == Tok::LParen) depth++;
      if (k == Tok::RParen) depth--;
      if (k == Tok::Eof) return false;
      i++;
    }
    return i < toks_.size() && toks_[i].kind == Tok::Arrow;
  }

  ExprPtr parseLambda() {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Lambda;
    e->loc = cur().loc;
    e->params = parseParams();
    expect(Tok::Arrow, "lambda");
    if (at(Tok::LBrace))
      e->lambdaBody = parseBlock();
    else
      e->lambdaExpr = parseExpr();
    return e;
  }

  ExprPtr parsePostfix() {
    ExprPtr e = parsePrimary();
    for (;;) {
      if (at(Tok::Dot)) {
        take();
        Token field = expect(Tok::Ident, "field access");
        auto fa = std::make_unique<Expr>();
        fa->kind = ExprKind::FieldAccess;
        fa->loc = field.loc;
        fa->text = field.text;
        fa->base = std::move(e);
        e = std::move(fa);
      } else if (at(Tok::LParen)) {
        auto call = std::make_unique<Expr>();
        call->kind = ExprKind::Call;
        call->loc = cur().loc;
        call->base = std::move(e);
        call->args = parseArgs();
        e = std::move(call);
      } else if (at(Tok::LBracket)) {
        take();
        auto idx = std::make_unique<Expr>();
        idx->kind = ExprKind::Index;
        idx->loc = cur().loc;
        idx->base = std::move(e);
        idx->index = parseExpr();
        expect(Tok::RBracket, "index expression");
        e = std::move(idx);
      } else {
        return e;
      }
    }
  }

  std::vector<ExprPtr> parseArgs() {
    expect(Tok::LParen, "argument list");
    std::vector<ExprPtr> out;
    while (!at(Tok::RParen)) {
      out.push_back(parseExpr());
      if (!accept(Tok::Comma)) break;
    }
    expect(Tok::RParen, "argument list");
    return out;
  }

  ExprPtr parsePrimary() {
    auto e = std::make_unique<Expr>();
    e->loc = cur().loc;
    switch (cur().kind) {
      case Tok::Ident:
        e->kind = ExprKind::Ident;
        e->text = take().text;
        return e;
      case Tok::KwThis:
        e->kind = ExprKind::This;
        take();
        return e;
      case Tok::String:
        e->kind = ExprKind::StringLit;
        e->text = take().text;
        return e;
      case Tok::Number:
        e->kind = ExprKind::NumberLit;
        e->text = take().text;
        return e;
      case Tok::KwTrue:
      case Tok::KwFalse:
        e->kind = ExprKind::BoolLit;
        e->text = take().text;
        return e;
      case Tok::KwNull:
      case Tok::KwUndefined:
        e->kind = ExprKind::NullLit;
        e->text = take().text;
        return e;
      case Tok::KwNew: {
        take();
        e->kind = ExprKind::New;
        e->text = expect(Tok::Ident, "new expression").text;
        if (at(Tok::LParen)) e->args = parseArgs();
        return e;
      }
      case Tok::LBracket: {
        take();
        e->kind = ExprKind::ArrayLit;
        while (!at(Tok::RBracket)) {
          e->args.push_back(parseExpr());
          if (!accept(Tok::Comma)) break;
        }
        expect(Tok::RBracket, "array literal");
        return e;
      }
      case Tok::LParen: {
        take();
        ExprPtr inner = parseExpr();
        expect(Tok::RParen, "parenthesized expression");
        return inner;
      }
      default:
        fail(std::string("unexpected ") + tokName(cur().kind) + " in expression");
    }
  }
};

// [OP] parse_module
inline SourceModule parse_module(const std::string& sourceText, const std::string& path) {
  return Parser::parse(sourceText, path);
}

}  // namespace minipta
