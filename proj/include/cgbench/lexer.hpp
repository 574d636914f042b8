#ifndef CGBENCH_LEXER_HPP
#define CGBENCH_LEXER_HPP

#include <cctype>
#include <string>
#include <unordered_set>
#include <vector>

#include "cgbench/error.hpp"

namespace cgbench {

enum class TokKind { identifier, keyword, number, string, regex, punct, eof };

struct Token {
  TokKind kind = TokKind::eof;
  std::string text;       // decoded value for strings, raw lexeme otherwise
  int line = 1;
  int column = 1;
  bool nl_before = false;  // a line terminator precedes this token
};

namespace detail {

inline const std::unordered_set<std::string>& js_keywords() {
  static const std::unordered_set<std::string> kw = {
      "break", "case", "catch", "continue", "debugger", "default", "delete",
      "do", "else", "finally", "for", "function", "if", "in", "instanceof",
      "new", "null", "return", "switch", "this", "throw", "true", "try",
      "typeof", "var", "void", "while", "with",
      // recognized so the parser can reject them with a clear message
      "class", "const", "let", "import", "export", "super", "yield"};
  return kw;
}

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
inline bool ident_part(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

}  // namespace detail

/// Hand-written scanner for the ES5 subset. The only stateful decision is
/// regex-vs-division, resolved from the previous significant token.
class Lexer {
 public:
  Lexer(std::string source, std::string file)
      : src_(std::move(source)), file_(std::move(file)) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      bool end = t.kind == TokKind::eof;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::parse_error, file_, line_, col_, msg);
  }

  [[noreturn]] void unsupported(const std::string& msg) const {
    throw Error(Errc::unsupported_construct, file_, line_, col_, msg);
  }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
        advance();
      } else if (c == '\n') {
        nl_pending_ = true;
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (peek() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        for (;;) {
          if (!peek()) fail("unterminated block comment");
          if (peek() == '\n') nl_pending_ = true;
          if (peek() == '*' && peek(1) == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        break;
      }
    }
  }

  bool regex_allowed() const {
    // After a value-ending token a slash is division; anywhere else a regex.
    switch (prev_.kind) {
      case TokKind::eof:
        return true;  // also covers "no previous token"
      case TokKind::identifier:
      case TokKind::number:
      case TokKind::string:
      case TokKind::regex:
        return false;
      case TokKind::keyword:
        return !(prev_.text == "this" || prev_.text == "true" ||
                 prev_.text == "false" || prev_.text == "null");
      case TokKind::punct:
        return !(prev_.text == ")" || prev_.text == "]" ||
                 prev_.text == "++" || prev_.text == "--");
    }
    return true;
  }

  Token make(TokKind k, std::string text, int line, int col) {
    Token t{k, std::move(text), line, col, nl_pending_ && !first_};
    nl_pending_ = false;
    first_ = false;
    prev_ = t;
    return t;
  }

  Token next() {
    skip_trivia();
    int line = line_, col = col_;
    if (pos_ >= src_.size()) return make(TokKind::eof, "", line, col);
    char c = peek();

    if (detail::ident_start(c)) {
      std::string s;
      while (detail::ident_part(peek())) s += advance();
      TokKind k = detail::js_keywords().count(s) ? TokKind::keyword
                                                 : TokKind::identifier;
      return make(k, std::move(s), line, col);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
      return lex_number(line, col);
    if (c == '"' || c == '\'') return lex_string(line, col);
    if (c == '/' && regex_allowed()) return lex_regex(line, col);
    if (c == '`') unsupported("template literals are outside the supported language subset");
    return lex_punct(line, col);
  }

  Token lex_number(int line, int col) {
    std::string s;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      s += advance();
      s += advance();
      if (!std::isxdigit(static_cast<unsigned char>(peek())))
        fail("malformed hexadecimal literal");
      while (std::isxdigit(static_cast<unsigned char>(peek()))) s += advance();
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
      if (peek() == '.') {
        s += advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        s += advance();
        if (peek() == '+' || peek() == '-') s += advance();
        if (!std::isdigit(static_cast<unsigned char>(peek())))
          fail("malformed exponent");
        while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
      }
    }
    if (detail::ident_start(peek())) fail("identifier begins after number");
    return make(TokKind::number, std::move(s), line, col);
  }

  void append_code_point(std::string& s, unsigned cp) {
    if (cp < 0x80) {
      s += static_cast<char>(cp);
    } else if (cp < 0x800) {
      s += static_cast<char>(0xC0 | (cp >> 6));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      s += static_cast<char>(0xE0 | (cp >> 12));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  unsigned hex_digits(int n) {
    unsigned v = 0;
    for (int i = 0; i < n; ++i) {
      char c = peek();
      if (!std::isxdigit(static_cast<unsigned char>(c))) fail("bad hex escape");
      advance();
      v = v * 16 + (std::isdigit(static_cast<unsigned char>(c))
                        ? c - '0'
                        : (std::tolower(c) - 'a' + 10));
    }
    return v;
  }

  Token lex_string(int line, int col) {
    char quote = advance();
    std::string s;
    for (;;) {
      char c = peek();
      if (!c || c == '\n') fail("unterminated string literal");
      advance();
      if (c == quote) break;
      if (c != '\\') {
        s += c;
        continue;
      }
      char e = peek();
      if (!e) fail("unterminated string literal");
      advance();
      switch (e) {
        case 'b': s += '\b'; break;
        case 't': s += '\t'; break;
        case 'n': s += '\n'; break;
        case 'v': s += '\v'; break;
        case 'f': s += '\f'; break;
        case 'r': s += '\r'; break;
        case '0': s += '\0'; break;
        case 'x': append_code_point(s, hex_digits(2)); break;
        case 'u': append_code_point(s, hex_digits(4)); break;
        case '\n': break;  // line continuation
        default: s += e; break;
      }
    }
    return make(TokKind::string, std::move(s), line, col);
  }

  Token lex_regex(int line, int col) {
    std::string s;
    s += advance();  // '/'
    bool in_class = false;
    for (;;) {
      char c = peek();
      if (!c || c == '\n') fail("unterminated regular expression");
      s += advance();
      if (c == '\\') {
        if (!peek() || peek() == '\n') fail("unterminated regular expression");
        s += advance();
      } else if (c == '[') {
        in_class = true;
      } else if (c == ']') {
        in_class = false;
      } else if (c == '/' && !in_class) {
        break;
      }
    }
    while (detail::ident_part(peek())) s += advance();  // flags
    return make(TokKind::regex, std::move(s), line, col);
  }

  Token lex_punct(int line, int col) {
    static const char* three_plus[] = {">>>=", "===", "!==", ">>>", "<<=", ">>=",
                                       "..."};
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||", "++", "--",
                                "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
                                "<<", ">>", "=>"};
    for (const char* p : three_plus) {
      size_t n = std::char_traits<char>::length(p);
      if (src_.compare(pos_, n, p) == 0) {
        std::string s;
        for (size_t i = 0; i < n; ++i) s += advance();
        return make(TokKind::punct, std::move(s), line, col);
      }
    }
    for (const char* p : two) {
      if (src_.compare(pos_, 2, p) == 0) {
        std::string s;
        s += advance();
        s += advance();
        return make(TokKind::punct, std::move(s), line, col);
      }
    }
    static const std::string singles = "{}()[];,<>+-*%&|^!~?:=./";
    char c = peek();
    if (singles.find(c) == std::string::npos) fail("unexpected character");
    std::string s(1, advance());
    return make(TokKind::punct, std::move(s), line, col);
  }

  std::string src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  bool nl_pending_ = false;
  bool first_ = true;
  Token prev_{};  // eof kind doubles as "nothing yet"
};

}  // namespace cgbench

#endif  // CGBENCH_LEXER_HPP
