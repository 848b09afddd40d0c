#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "droidcall/call_plan.hpp"
#include "droidcall/value.hpp"

namespace droidcall::syntax {

enum class TokenKind {
  Ident,
  Int,
  Float,
  String,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Equals,
  Colon,
  Arrow,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier name or raw spelling
  ArgValue value;    // decoded literal for Int/Float/String
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

// Python-flavoured tokenizer: '#' comments, single or double quoted strings,
// signed numbers. Throws PlanError(SyntaxError) with a position.
std::vector<Token> tokenize(std::string_view text);

class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at(TokenKind kind) const { return peek().kind == kind; }
  bool accept(TokenKind kind);
  const Token& expect(TokenKind kind, std::string_view what);
  [[noreturn]] void fail(const Token& at, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// Resolves identifiers other than true/false/True/False.
using IdentResolver = std::function<ArgValue(const Token&)>;

// value := literal | ident | '[' values ']' | '{' string ':' value, ... '}'
ArgValue parse_value(TokenCursor& cursor, const IdentResolver& resolve_ident);

}  // namespace droidcall::syntax
