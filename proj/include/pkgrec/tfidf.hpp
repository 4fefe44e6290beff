#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkgrec/recommendation.hpp"

namespace pkgrec {

/// Package name -> free-text description of what the package does.
class LibraryCatalog {
 public:
  /// Throws InvalidArgumentError for duplicate names or blank descriptions.
  void add(std::string package, std::string description);

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool operator==(const LibraryCatalog&) const = default;

 private:
  std::map<std::string, std::string> entries_;
};

// One {"package": ..., "description": ...} object per line.
LibraryCatalog read_catalog_jsonl(std::istream& in);
LibraryCatalog read_catalog_jsonl(const std::filesystem::path& path);
void write_catalog_jsonl(const LibraryCatalog& catalog, std::ostream& out);

struct TokenizerConfig {
  std::size_t min_token_length = 2;
  bool use_stop_words = true;
  bool operator==(const TokenizerConfig&) const = default;
};

/// Lowercased alphanumeric runs of at least min_token_length characters,
/// with English stop words removed.
std::vector<std::string> tokenize_text(std::string_view text, const TokenizerConfig& config = {});

bool is_stop_word(std::string_view word);

struct SparseEntry {
  std::uint32_t term;
  double weight;
  bool operator==(const SparseEntry&) const = default;
};
using SparseVector = std::vector<SparseEntry>;  // sorted by term id

/// TF-IDF over catalog descriptions: tf = 1 + ln(count),
/// idf = ln((1 + D) / (1 + df)) + 1, document vectors L2-normalised.
class TfIdfIndex {
 public:
  TfIdfIndex(std::vector<std::string> terms, std::vector<double> idf, std::vector<std::string> packages,
             std::vector<SparseVector> doc_vectors, TokenizerConfig tokenizer);

  std::optional<std::uint32_t> term_id(std::string_view term) const;
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  const std::vector<std::string>& packages() const noexcept { return packages_; }
  const SparseVector& doc_vector(std::size_t doc) const { return docs_.at(doc); }
  const TokenizerConfig& tokenizer() const noexcept { return tokenizer_; }
  std::size_t size() const noexcept { return packages_.size(); }

  /// Unit-norm TF-IDF vector of `text`; terms outside the index are ignored.
  /// Empty when no term is known.
  SparseVector vectorize(std::string_view text) const;

  bool operator==(const TfIdfIndex& other) const {
    return terms_ == other.terms_ && idf_ == other.idf_ && packages_ == other.packages_ && docs_ == other.docs_ &&
           tokenizer_ == other.tokenizer_;
  }

 private:
  std::vector<std::string> terms_;  // sorted; id = position
  std::vector<double> idf_;
  std::vector<std::string> packages_;  // sorted
  std::vector<SparseVector> docs_;
  TokenizerConfig tokenizer_;
};

double sparse_dot(const SparseVector& a, const SparseVector& b);

/// Descriptions that tokenize to nothing are left out of the index.
/// Throws EmptyIndexError if nothing is left.
TfIdfIndex build_index(const LibraryCatalog& catalog, const TokenizerConfig& tokenizer = {});

/// Top-k packages by cosine with the query. Zero scores are dropped; ties go
/// to the lexicographically smaller name.
std::vector<Recommendation> query_index(const TfIdfIndex& index, std::string_view text, int k);

}  // namespace pkgrec
