#include "pkgrec/source_scan.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace pkgrec::source {

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }
bool is_quote(char c) { return c == '"' || c == '\''; }

bool is_string_prefix(std::string_view word) {
  if (word.empty() || word.size() > 2) return false;
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  static constexpr std::array<std::string_view, 8> kPrefixes = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};
  return std::find(kPrefixes.begin(), kPrefixes.end(), lower) != kPrefixes.end();
}

// Returns the offset one past the end of the string literal whose opening
// quote is at `quote_pos`.
std::size_t scan_string(std::string_view src, std::size_t quote_pos) {
  const char q = src[quote_pos];
  const bool triple = quote_pos + 2 < src.size() && src[quote_pos + 1] == q && src[quote_pos + 2] == q;
  std::size_t pos = quote_pos + (triple ? 3 : 1);
  while (pos < src.size()) {
    const char c = src[pos];
    if (c == '\\') {
      pos += 2;
      continue;
    }
    if (triple) {
      if (c == q && src.substr(pos, 3) == std::string(3, q)) return pos + 3;
    } else {
      if (c == q) return pos + 1;
      if (c == '\n') return pos;
    }
    ++pos;
  }
  return src.size();
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int depth = 0;
  std::size_t pos = 0;
  auto push = [&](TokenKind kind, std::size_t b, std::size_t e) {
    out.push_back(Token{kind, src.substr(b, e - b), b, e});
  };

  while (pos < src.size()) {
    const auto c = static_cast<unsigned char>(src[pos]);
    if (c == '\n') {
      if (depth == 0 && (out.empty() || out.back().kind != TokenKind::Newline)) push(TokenKind::Newline, pos, pos + 1);
      ++pos;
    } else if (c == '\\') {
      // Line continuation, or a stray backslash.
      ++pos;
      if (pos < src.size() && src[pos] == '\r') ++pos;
      if (pos < src.size() && src[pos] == '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++pos;
    } else if (c == '#') {
      const auto e = std::min(src.find('\n', pos), src.size());
      push(TokenKind::Comment, pos, e);
      pos = e;
    } else if (is_quote(static_cast<char>(c))) {
      const auto e = scan_string(src, pos);
      push(TokenKind::String, pos, e);
      pos = e;
    } else if (std::isdigit(c) || (c == '.' && pos + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
      std::size_t e = pos + 1;
      while (e < src.size() && (is_ident_char(static_cast<unsigned char>(src[e])) || src[e] == '.')) ++e;
      push(TokenKind::Number, pos, e);
      pos = e;
    } else if (is_ident_start(c)) {
      std::size_t e = pos + 1;
      while (e < src.size() && is_ident_char(static_cast<unsigned char>(src[e]))) ++e;
      if (e < src.size() && is_quote(src[e]) && is_string_prefix(src.substr(pos, e - pos))) {
        const auto se = scan_string(src, e);
        push(TokenKind::String, pos, se);
        pos = se;
      } else {
        push(TokenKind::Name, pos, e);
        pos = e;
      }
    } else {
      std::size_t len = 1;
      const auto rest = src.substr(pos);
      if (rest.starts_with("...")) {
        len = 3;
      } else if (rest.starts_with(":=") || rest.starts_with("->") || rest.starts_with("**")) {
        len = 2;
      }
      if (c == '(' || c == '[' || c == '{') ++depth;
      if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
      push(TokenKind::Op, pos, pos + len);
      pos += len;
    }
  }
  if (!out.empty() && out.back().kind != TokenKind::Newline) push(TokenKind::Newline, src.size(), src.size());
  return out;
}

std::vector<std::vector<Token>> logical_lines(std::span<const Token> tokens) {
  std::vector<std::vector<Token>> lines;
  std::vector<Token> current;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Comment) continue;
    if (t.kind == TokenKind::Newline) {
      if (!current.empty()) lines.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(t);
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

std::string_view string_body(std::string_view literal) {
  std::size_t start = 0;
  while (start < literal.size() && !is_quote(literal[start])) ++start;
  if (start >= literal.size()) return {};
  const char q = literal[start];
  const bool triple = literal.substr(start).starts_with(std::string(3, q));
  const std::size_t open = triple ? 3 : 1;
  std::string_view body = literal.substr(start + open);
  const std::string close(open, q);
  if (body.size() >= open && body.ends_with(close)) body.remove_suffix(open);
  return body;
}

bool is_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 35> kKeywords = {
      "False", "None",   "True",    "and",      "as",       "assert", "async",  "await", "break",
      "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
      "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
      "or",    "pass",   "raise",   "return",   "try",      "while",  "with",   "yield"};
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::string normalize_words(std::string_view text) {
  std::string out;
  bool in_word = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (!in_word && !out.empty()) out.push_back(' ');
      out.push_back(static_cast<char>(std::tolower(c)));
      in_word = true;
    } else {
      in_word = false;
    }
  }
  return out;
}

std::string split_identifier(std::string_view identifier) {
  std::string spaced;
  for (std::size_t i = 0; i < identifier.size(); ++i) {
    const auto c = static_cast<unsigned char>(identifier[i]);
    if (i > 0 && std::isupper(c)) {
      const auto prev = static_cast<unsigned char>(identifier[i - 1]);
      const bool next_lower = i + 1 < identifier.size() && std::islower(static_cast<unsigned char>(identifier[i + 1]));
      // fooBar -> foo Bar; HTTPServer -> HTTP Server
      if (std::islower(prev) || std::isdigit(prev) || (std::isupper(prev) && next_lower)) spaced.push_back(' ');
    }
    spaced.push_back(static_cast<char>(c));
  }
  return normalize_words(spaced);
}

}  // namespace pkgrec::source
