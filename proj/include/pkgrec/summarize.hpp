#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pkgrec {

enum class SpanKind { docstring, comment, identifiers, external_summary };

const char* to_string(SpanKind kind);

struct SummarySpan {
  std::string unit_id;  // file or notebook cell the text came from
  SpanKind kind;
  bool operator==(const SummarySpan&) const = default;
};

/// Natural-language description of a piece of code, used as a retrieval query.
struct CodeSummary {
  std::string text;
  std::vector<SummarySpan> source_spans;
  std::vector<std::string> warnings;
};

/// Docstrings, then comments, then identifiers split into words; each group
/// in document order, all lowercased. Never throws.
CodeSummary summarize_heuristic(std::string_view source_text, std::string_view unit_id = "file");

/// Text of the module/class/function docstrings, normalised to lowercase words.
std::string docstring_text(std::string_view source_text);

/// Source with every docstring literal replaced by an empty string literal.
std::string strip_docstrings(std::string_view source_text);

class Summarizer {
 public:
  virtual ~Summarizer() = default;
  virtual CodeSummary summarize(std::string_view code, std::string_view unit_id) const = 0;
};

class HeuristicSummarizer final : public Summarizer {
 public:
  CodeSummary summarize(std::string_view code, std::string_view unit_id) const override {
    return summarize_heuristic(code, unit_id);
  }
};

struct RemoteSummarizerConfig {
  /// Base address, e.g. "http://127.0.0.1:9000"; requests go to POST /summarize.
  std::string endpoint;
  std::chrono::milliseconds timeout{10'000};
  bool fallback_to_heuristic = true;
};

/// Client for an external summarisation service: POST /summarize with
/// {"code": ...}, expecting {"summary": ...}. On failure either falls back to
/// the heuristic (adding a warning) or throws SummarizerUnavailableError.
CodeSummary summarize_remote(std::string_view source_text, const RemoteSummarizerConfig& config,
                             std::string_view unit_id = "file");

class RemoteSummarizer final : public Summarizer {
 public:
  explicit RemoteSummarizer(RemoteSummarizerConfig config) : config_(std::move(config)) {}
  CodeSummary summarize(std::string_view code, std::string_view unit_id) const override {
    return summarize_remote(code, config_, unit_id);
  }

 private:
  RemoteSummarizerConfig config_;
};

/// Summaries of several units (e.g. notebook cells) concatenated into one query.
CodeSummary summarize_units(const Summarizer& summarizer,
                            const std::vector<std::pair<std::string, std::string>>& units);

}  // namespace pkgrec
