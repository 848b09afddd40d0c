#include "droidcall/code_syntax.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <limits>

namespace droidcall::syntax {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      Token tok;
      tok.offset = pos_;
      tok.line = line_;
      tok.column = column();
      if (pos_ >= text_.size()) {
        tok.kind = TokenKind::End;
        out.push_back(std::move(tok));
        return out;
      }
      char c = text_[pos_];
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        tok.kind = TokenKind::Ident;
        tok.text = std::string(text_.substr(start, pos_ - start));
      } else if (is_digit(c) || ((c == '-' || c == '+' || c == '.') && pos_ + 1 < text_.size() &&
                                 (is_digit(text_[pos_ + 1]) || text_[pos_ + 1] == '.'))) {
        scan_number(tok);
      } else if (c == '"' || c == '\'') {
        scan_string(tok, c);
      } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
        tok.kind = TokenKind::Arrow;
        tok.text = "->";
        pos_ += 2;
      } else {
        switch (c) {
          case '(': tok.kind = TokenKind::LParen; break;
          case ')': tok.kind = TokenKind::RParen; break;
          case '[': tok.kind = TokenKind::LBracket; break;
          case ']': tok.kind = TokenKind::RBracket; break;
          case '{': tok.kind = TokenKind::LBrace; break;
          case '}': tok.kind = TokenKind::RBrace; break;
          case ',': tok.kind = TokenKind::Comma; break;
          case '=': tok.kind = TokenKind::Equals; break;
          case ':': tok.kind = TokenKind::Colon; break;
          default:
            throw PlanError(PlanErrc::SyntaxError,
                            std::string("unexpected character '") + c + "'", line_, column());
        }
        tok.text = std::string(1, c);
        ++pos_;
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  std::size_t column() const { return pos_ - line_start_ + 1; }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        line_start_ = pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  void scan_number(Token& tok) {
    std::size_t start = pos_;
    std::size_t col = column();
    if (text_[pos_] == '-' || text_[pos_] == '+') ++pos_;
    bool is_float = false;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      is_float = true;
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
      if (pos_ < text_.size() && is_digit(text_[pos_])) {
        is_float = true;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    if (pos_ < text_.size() && is_ident_char(text_[pos_]))
      throw PlanError(PlanErrc::SyntaxError, "malformed number", line_, col);
    std::string spelling(text_.substr(start, pos_ - start));
    tok.text = spelling;
    std::string_view digits = spelling;
    if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
    if (is_float) {
      double d = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
      if (ec != std::errc{} || ptr != digits.data() + digits.size())
        throw PlanError(PlanErrc::SyntaxError, "malformed float '" + spelling + "'", line_, col);
      tok.kind = TokenKind::Float;
      tok.value = d;
    } else {
      std::int64_t i = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
      if (ec != std::errc{} || ptr != digits.data() + digits.size())
        throw PlanError(PlanErrc::SyntaxError, "integer out of range '" + spelling + "'", line_, col);
      tok.kind = TokenKind::Int;
      tok.value = i;
    }
  }

  void scan_string(Token& tok, char quote) {
    std::size_t start = pos_;
    std::size_t line = line_;
    std::size_t col = column();
    ++pos_;
    std::string decoded;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n')
        throw PlanError(PlanErrc::SyntaxError, "unterminated string literal", line, col);
      char c = text_[pos_];
      if (c == quote) {
        ++pos_;
        break;
      }
      if (c == '\\') {
        if (pos_ + 1 >= text_.size())
          throw PlanError(PlanErrc::SyntaxError, "unterminated string literal", line, col);
        char e = text_[pos_ + 1];
        if (e == 'u') {
          pos_ += 2;
          std::uint32_t cp = read_hex4(line, col);
          if (cp >= 0xD800 && cp <= 0xDBFF) {
            if (pos_ + 1 >= text_.size() || text_[pos_] != '\\' || text_[pos_ + 1] != 'u')
              throw PlanError(PlanErrc::SyntaxError, "unpaired surrogate in string literal", line, col);
            pos_ += 2;
            std::uint32_t low = read_hex4(line, col);
            if (low < 0xDC00 || low > 0xDFFF)
              throw PlanError(PlanErrc::SyntaxError, "unpaired surrogate in string literal", line, col);
            cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
          } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
            throw PlanError(PlanErrc::SyntaxError, "unpaired surrogate in string literal", line, col);
          }
          append_utf8(decoded, cp);
          continue;
        }
        switch (e) {
          case 'n': decoded += '\n'; break;
          case 't': decoded += '\t'; break;
          case 'r': decoded += '\r'; break;
          case 'b': decoded += '\b'; break;
          case 'f': decoded += '\f'; break;
          case '0': decoded += '\0'; break;
          case '\\': decoded += '\\'; break;
          case '\'': decoded += '\''; break;
          case '"': decoded += '"'; break;
          case '/': decoded += '/'; break;
          default:
            throw PlanError(PlanErrc::SyntaxError, std::string("unknown escape '\\") + e + "'",
                            line_, column());
        }
        pos_ += 2;
        continue;
      }
      decoded += c;
      ++pos_;
    }
    tok.kind = TokenKind::String;
    tok.text = std::string(text_.substr(start, pos_ - start));
    tok.value = std::move(decoded);
  }

  std::uint32_t read_hex4(std::size_t line, std::size_t col) {
    if (pos_ + 4 > text_.size())
      throw PlanError(PlanErrc::SyntaxError, "truncated \\u escape", line, col);
    std::uint32_t cp = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + pos_ + 4, cp, 16);
    if (ec != std::errc{} || ptr != text_.data() + pos_ + 4)
      throw PlanError(PlanErrc::SyntaxError, "malformed \\u escape", line, col);
    pos_ += 4;
    return cp;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Int: return "integer";
    case TokenKind::Float: return "float";
    case TokenKind::String: return "string";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::Equals: return "'='";
    case TokenKind::Colon: return "':'";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Scanner(text).run(); }

const Token& TokenCursor::peek(std::size_t ahead) const {
  std::size_t i = pos_ + ahead;
  if (i >= tokens_.size()) return tokens_.back();
  return tokens_[i];
}

const Token& TokenCursor::next() {
  const Token& t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenCursor::accept(TokenKind kind) {
  if (!at(kind)) return false;
  next();
  return true;
}

const Token& TokenCursor::expect(TokenKind kind, std::string_view what) {
  if (!at(kind)) {
    fail(peek(), "expected " + std::string(what) + ", found " + std::string(describe(peek().kind)));
  }
  return next();
}

void TokenCursor::fail(const Token& at, const std::string& message) const {
  throw PlanError(PlanErrc::SyntaxError, message, at.line, at.column);
}

ArgValue parse_value(TokenCursor& cursor, const IdentResolver& resolve_ident) {
  const Token& tok = cursor.peek();
  switch (tok.kind) {
    case TokenKind::Int:
    case TokenKind::Float:
    case TokenKind::String:
      return cursor.next().value;
    case TokenKind::Ident: {
      const Token& id = cursor.next();
      if (id.text == "true" || id.text == "True") return true;
      if (id.text == "false" || id.text == "False") return false;
      return resolve_ident(id);
    }
    case TokenKind::LBracket: {
      cursor.next();
      ArgList items;
      while (!cursor.at(TokenKind::RBracket)) {
        items.push_back(parse_value(cursor, resolve_ident));
        if (!cursor.accept(TokenKind::Comma)) break;
      }
      cursor.expect(TokenKind::RBracket, "']'");
      return items;
    }
    case TokenKind::LBrace: {
      cursor.next();
      ArgMap entries;
      while (!cursor.at(TokenKind::RBrace)) {
        const Token& key = cursor.expect(TokenKind::String, "string map key");
        std::string k = key.value.as_string();
        cursor.expect(TokenKind::Colon, "':'");
        if (entries.count(k)) cursor.fail(key, "duplicate map key \"" + k + "\"");
        entries.emplace(std::move(k), parse_value(cursor, resolve_ident));
        if (!cursor.accept(TokenKind::Comma)) break;
      }
      cursor.expect(TokenKind::RBrace, "'}'");
      return entries;
    }
    default:
      cursor.fail(tok, "expected a value, found " + std::string(describe(tok.kind)));
  }
}

}  // namespace droidcall::syntax
