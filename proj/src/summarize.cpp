#include "pkgrec/summarize.hpp"

#include "httplib.h"
#include "json.hpp"
#include "pkgrec/error.hpp"
#include "pkgrec/source_scan.hpp"

namespace pkgrec {

namespace {

using source::Token;
using source::TokenKind;

bool starts_block(const std::vector<Token>& line) {
  if (line.empty() || line[0].kind != TokenKind::Name) return false;
  if (line[0].text == "def" || line[0].text == "class") return true;
  return line[0].text == "async" && line.size() > 1 && line[1].text == "def";
}

bool all_strings(std::span<const Token> toks) {
  if (toks.empty()) return false;
  for (const auto& t : toks) {
    if (t.kind != TokenKind::String) return false;
  }
  return true;
}

// Docstring literals: a bare string statement opening the module, or the
// body of a def/class (on the header line or the line after it).
std::vector<Token> find_docstrings(std::string_view src) {
  const auto tokens = source::tokenize(src);
  std::vector<Token> docs;
  bool after_header = true;  // module start behaves like a header
  for (const auto& line : source::logical_lines(tokens)) {
    if (after_header && all_strings(line)) {
      docs.insert(docs.end(), line.begin(), line.end());
      after_header = false;
      continue;
    }
    after_header = false;
    if (!starts_block(line)) continue;
    int depth = 0;
    for (std::size_t i = 1; i < line.size(); ++i) {
      const auto& t = line[i];
      if (t.kind != TokenKind::Op) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (depth == 0 && t.text == ":") {
        const auto rest = std::span<const Token>(line).subspan(i + 1);
        if (rest.empty()) {
          after_header = true;
        } else if (all_strings(rest)) {
          docs.insert(docs.end(), rest.begin(), rest.end());
        }
        break;
      }
    }
  }
  return docs;
}

bool is_pragma_comment(const Token& t) {
  return (t.begin == 0 && t.text.starts_with("#!")) || t.text.find("coding:") != std::string_view::npos ||
         t.text.find("coding=") != std::string_view::npos;
}

void append_words(std::string& out, const std::string& words) {
  if (words.empty()) return;
  if (!out.empty()) out.push_back(' ');
  out += words;
}

}  // namespace

const char* to_string(SpanKind kind) {
  switch (kind) {
    case SpanKind::docstring: return "docstring";
    case SpanKind::comment: return "comment";
    case SpanKind::identifiers: return "identifiers";
    case SpanKind::external_summary: return "external_summary";
  }
  return "unknown";
}

std::string docstring_text(std::string_view source_text) {
  std::string out;
  for (const auto& t : find_docstrings(source_text)) append_words(out, source::normalize_words(source::string_body(t.text)));
  return out;
}

std::string strip_docstrings(std::string_view source_text) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& t : find_docstrings(source_text)) {
    out.append(source_text.substr(pos, t.begin - pos));
    out.append("\"\"");
    pos = t.end;
  }
  out.append(source_text.substr(pos));
  return out;
}

CodeSummary summarize_heuristic(std::string_view source_text, std::string_view unit_id) {
  const auto tokens = source::tokenize(source_text);
  std::string docs = docstring_text(source_text);
  std::string comments;
  std::string identifiers;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Comment && !is_pragma_comment(t)) {
      append_words(comments, source::normalize_words(t.text.substr(1)));
    } else if (t.kind == TokenKind::Name && !source::is_keyword(t.text)) {
      append_words(identifiers, source::split_identifier(t.text));
    }
  }
  CodeSummary summary;
  const std::pair<const std::string*, SpanKind> parts[] = {
      {&docs, SpanKind::docstring}, {&comments, SpanKind::comment}, {&identifiers, SpanKind::identifiers}};
  for (const auto& [text, kind] : parts) {
    if (text->empty()) continue;
    append_words(summary.text, *text);
    summary.source_spans.push_back({std::string(unit_id), kind});
  }
  return summary;
}

CodeSummary summarize_remote(std::string_view source_text, const RemoteSummarizerConfig& config,
                             std::string_view unit_id) {
  auto fail = [&](const std::string& cause) -> CodeSummary {
    if (!config.fallback_to_heuristic) throw SummarizerUnavailableError(cause);
    auto summary = summarize_heuristic(source_text, unit_id);
    summary.warnings.push_back("summarizer unavailable (" + cause + "); used heuristic summary");
    return summary;
  };
  if (config.endpoint.empty()) return fail("no endpoint configured");

  httplib::Client client(config.endpoint);
  if (!client.is_valid()) return fail("invalid endpoint '" + config.endpoint + "'");
  const auto secs = config.timeout.count() / 1000;
  const auto usecs = (config.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const nlohmann::json body = {{"code", std::string(source_text)}};
  const auto res = client.Post("/summarize", body.dump(), "application/json");
  if (!res) return fail("transport error: " + httplib::to_string(res.error()));
  if (res->status != 200) return fail("HTTP " + std::to_string(res->status));

  std::string text;
  try {
    text = nlohmann::json::parse(res->body).at("summary").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    return fail(std::string("malformed response: ") + e.what());
  }
  CodeSummary summary;
  summary.text = source::normalize_words(text);
  if (!summary.text.empty()) summary.source_spans.push_back({std::string(unit_id), SpanKind::external_summary});
  return summary;
}

CodeSummary summarize_units(const Summarizer& summarizer,
                            const std::vector<std::pair<std::string, std::string>>& units) {
  CodeSummary out;
  for (const auto& [id, code] : units) {
    auto part = summarizer.summarize(code, id);
    append_words(out.text, part.text);
    out.source_spans.insert(out.source_spans.end(), part.source_spans.begin(), part.source_spans.end());
    out.warnings.insert(out.warnings.end(), part.warnings.begin(), part.warnings.end());
  }
  return out;
}

}  // namespace pkgrec
