#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "minipta/diagnostics.hpp"

namespace minipta {

enum class Tok {
  Eof,
  Ident,
  Number,
  String,
  // keywords
  KwLet,
  KwConst,
  KwNew,
  KwReturn,
  KwFunction,
  KwClass,
  KwStruct,
  KwNamespace,
  KwExtends,
  KwConstructor,
  KwStatic,
  KwThis,
  KwIf,
  KwElse,
  KwWhile,
  KwFor,
  KwTrue,
  KwFalse,
  KwNull,
  KwUndefined,
  // punctuation
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Dot,
  Colon,
  Semicolon,
  Assign,
  Arrow,
  At,
  Pipe,
  Plus,
  Less,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  SourceLoc loc;
};

inline const char* tokName(Tok t) {
  switch (t) {
    case Tok::Eof: return "<eof>";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::KwLet: return "'let'";
    case Tok::KwConst: return "'const'";
    case Tok::KwNew: return "'new'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwFunction: return "'function'";
    case Tok::KwClass: return "'class'";
    case Tok::KwStruct: return "'struct'";
    case Tok::KwNamespace: return "'namespace'";
    case Tok::KwExtends: return "'extends'";
    case Tok::KwConstructor: return "'constructor'";
    case Tok::KwStatic: return "'static'";
    case Tok::KwThis: return "'this'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwFor: return "'for'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwNull: return "'null'";
    case Tok::KwUndefined: return "'undefined'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::Semicolon: return "';'";
    case Tok::Assign: return "'='";
    case Tok::Arrow: return "'=>'";
    case Tok::At: return "'@'";
    case Tok::Pipe: return "'|'";
    case Tok::Plus: return "'+'";
    case Tok::Less: return "'<'";
  }
  return "?";
}

class Lexer {
 public:
  Lexer(std::string source, std::string path)
      : src_(std::move(source)), path_(std::move(path)) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::Eof) break;
    }
    return out;
  }

 private:
  std::string src_;
  std::string path_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      line_++;
      col_ = 1;
    } else {
      col_++;
    }
    return c;
  }
  SourceLoc here() const { return {path_, line_, col_}; }

  void skipTrivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (peek() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (peek() && !(peek() == '*' && peek(1) == '/')) advance();
        if (peek()) {
          advance();
          advance();
        }
      } else {
        break;
      }
    }
  }

  Token next() {
    skipTrivia();
    SourceLoc loc = here();
    if (pos_ >= src_.size()) return {Tok::Eof, "", loc};
    char c = advance();

    if (isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::string word(1, c);
      while (isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '$')
        word.push_back(advance());
      return {keyword(word), word, loc};
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      std::string num(1, c);
      while (isdigit(static_cast<unsigned char>(peek())) || peek() == '.')
        num.push_back(advance());
      return {Tok::Number, num, loc};
    }
    if (c == '\'' || c == '"') {
      char quote = c;
      std::string text;
      while (peek() && peek() != quote && peek() != '\n') text.push_back(advance());
      if (peek() != quote)
        throw AnalysisError({Severity::Error, loc, "unterminated string literal"});
      advance();
      return {Tok::String, text, loc};
    }

    switch (c) {
      case '(': return {Tok::LParen, "(", loc};
      case ')': return {Tok::RParen, ")", loc};
      case '{': return {Tok::LBrace, "{", loc};
      case '}': return {Tok::RBrace, "}", loc};
      case '[': return {Tok::LBracket, "[", loc};
      case ']': return {Tok::RBracket, "]", loc};
      case ',': return {Tok::Comma, ",", loc};
      case '.': return {Tok::Dot, ".", loc};
      case ':': return {Tok::Colon, ":", loc};
      case ';': return {Tok::Semicolon, ";", loc};
      case '@': return {Tok::At, "@", loc};
      case '|': return {Tok::Pipe, "|", loc};
      case '+': return {Tok::Plus, "+", loc};
      case '<': return {Tok::Less, "<", loc};
      case '=':
        if (peek() == '>') {
          advance();
          return {Tok::Arrow, "=>", loc};
        }
        if (peek() == '=') {  // comparison, only legal inside flattened conditions
          advance();
          return {Tok::Less, "==", loc};
        }
        return {Tok::Assign, "=", loc};
      default:
        throw AnalysisError(
            {Severity::Error, loc, std::string("unexpected character '") + c + "'"});
    }
  }

  static Tok keyword(const std::string& w) {
    if (w == "let") return Tok::KwLet;
    if (w == "const") return Tok::KwConst;
    if (w == "new") return Tok::KwNew;
    if (w == "return") return Tok::KwReturn;
    if (w == "function") return Tok::KwFunction;
    if (w == "class") return Tok::KwClass;
    if (w == "struct") return Tok::KwStruct;
    if (w == "namespace") return Tok::KwNamespace;
    if (w == "extends") return Tok::KwExtends;
    if (w == "constructor") return Tok::KwConstructor;
    if (w == "static") return Tok::KwStatic;
    if (w == "this") return Tok::KwThis;
    if (w == "if") return Tok::KwIf;
    if (w == "else") return Tok::KwElse;
    if (w == "while") return Tok::KwWhile;
    if (w == "for") return Tok::KwFor;
    if (w == "true") return Tok::KwTrue;
    if (w == "false") return Tok::KwFalse;
    if (w == "null") return Tok::KwNull;
    if (w == "undefined") return Tok::KwUndefined;
    return Tok::Ident;
  }
};

}  // namespace minipta
