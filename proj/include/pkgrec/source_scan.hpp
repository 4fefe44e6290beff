#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Tolerant tokenizer for Python-syntax source. It never fails: unterminated
// strings run to the end of their line (or of the input, for triple-quoted
// strings), unmatched brackets are ignored.
namespace pkgrec::source {

enum class TokenKind { Name, Number, String, Op, Comment, Newline };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t begin = 0;  // byte offset into the scanned source
  std::size_t end = 0;
};

/// Newline tokens mark the end of a logical line: they are not emitted inside
/// open brackets or after a backslash continuation.
std::vector<Token> tokenize(std::string_view source);

/// Groups tokens into logical lines, dropping comments and blank lines.
std::vector<std::vector<Token>> logical_lines(std::span<const Token> tokens);

/// Contents of a string literal with prefix and quotes removed.
std::string_view string_body(std::string_view literal);

bool is_keyword(std::string_view word);

/// Lowercased alphanumeric words of `text`, joined by single spaces.
std::string normalize_words(std::string_view text);

/// Splits an identifier on underscores, digits boundaries excluded, and case
/// transitions: "HTTPServer_v2" -> "http server v2".
std::string split_identifier(std::string_view identifier);

}  // namespace pkgrec::source
