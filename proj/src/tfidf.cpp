#include "pkgrec/tfidf.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "pkgrec/error.hpp"

namespace pkgrec {

void LibraryCatalog::add(std::string package, std::string description) {
  if (package.empty()) throw InvalidArgumentError("catalog entry without a package name");
  if (description.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw InvalidArgumentError("catalog entry '" + package + "' has an empty description");
  }
  if (!entries_.emplace(package, std::move(description)).second) {
    throw InvalidArgumentError("duplicate catalog entry '" + package + "'");
  }
}

LibraryCatalog read_catalog_jsonl(std::istream& in) {
  LibraryCatalog catalog;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      catalog.add(j.at("package").get<std::string>(), j.at("description").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("catalog line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InvalidArgumentError& e) {
      throw FormatError("catalog line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return catalog;
}

LibraryCatalog read_catalog_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_catalog_jsonl(in);
}

void write_catalog_jsonl(const LibraryCatalog& catalog, std::ostream& out) {
  for (const auto& [package, description] : catalog.entries()) {
    out << nlohmann::json{{"package", package}, {"description", description}}.dump() << '\n';
  }
}

bool is_stop_word(std::string_view word) {
  static constexpr std::array<std::string_view, 96> kStopWords = {
      "a",     "about", "above",   "after", "again", "all",   "also",  "am",    "an",    "and",   "any",   "are",
      "as",    "at",    "be",      "been",  "before", "being", "below", "between", "both", "but",   "by",    "can",
      "could", "did",   "do",      "does",  "doing", "down",  "during", "each", "few",   "for",   "from",  "further",
      "had",   "has",   "have",    "having", "he",   "her",   "here",  "hers",  "him",   "his",   "how",   "if",
      "in",    "into",  "is",      "it",    "its",   "itself", "just", "me",    "more",  "most",  "my",    "no",
      "nor",   "not",   "now",     "of",    "off",   "on",    "once",  "only",  "or",    "other", "our",   "out",
      "over",  "own",   "same",    "she",   "should", "so",   "some",  "such",  "than",  "that",  "the",   "their",
      "them",  "then",  "there",   "these", "they",  "this",  "those", "through", "to",  "too",   "under", "until"};
  static constexpr std::array<std::string_view, 22> kMore = {
      "up", "very", "was", "we", "were", "what", "when", "where", "which", "while", "who",
      "whom", "why", "will", "with", "would", "you", "your", "yours", "i", "s", "t"};
  return std::find(kStopWords.begin(), kStopWords.end(), word) != kStopWords.end() ||
         std::find(kMore.begin(), kMore.end(), word) != kMore.end();
}

std::vector<std::string> tokenize_text(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= config.min_token_length && !(config.use_stop_words && is_stop_word(current))) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TfIdfIndex::TfIdfIndex(std::vector<std::string> terms, std::vector<double> idf, std::vector<std::string> packages,
                       std::vector<SparseVector> doc_vectors, TokenizerConfig tokenizer)
    : terms_(std::move(terms)),
      idf_(std::move(idf)),
      packages_(std::move(packages)),
      docs_(std::move(doc_vectors)),
      tokenizer_(tokenizer) {
  if (terms_.size() != idf_.size()) throw FormatError("term and idf tables differ in length");
  if (packages_.size() != docs_.size()) throw FormatError("package and document tables differ in length");
  if (!std::is_sorted(terms_.begin(), terms_.end()) || std::adjacent_find(terms_.begin(), terms_.end()) != terms_.end()) {
    throw FormatError("terms must be sorted and unique");
  }
  if (!std::is_sorted(packages_.begin(), packages_.end()) ||
      std::adjacent_find(packages_.begin(), packages_.end()) != packages_.end()) {
    throw FormatError("packages must be sorted and unique");
  }
  for (double w : idf_) {
    if (!(w > 0.0)) throw FormatError("idf weights must be positive");
  }
  for (const auto& doc : docs_) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (doc[i].term >= terms_.size() || (i > 0 && doc[i - 1].term >= doc[i].term)) {
        throw FormatError("document vector terms out of range or unsorted");
      }
    }
  }
}

std::optional<std::uint32_t> TfIdfIndex::term_id(std::string_view term) const {
  const auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
  if (it == terms_.end() || *it != term) return std::nullopt;
  return static_cast<std::uint32_t>(it - terms_.begin());
}

namespace {

SparseVector weigh(const std::map<std::uint32_t, int>& counts, const std::vector<double>& idf) {
  SparseVector v;
  double norm2 = 0.0;
  for (const auto& [term, count] : counts) {
    const double w = (1.0 + std::log(static_cast<double>(count))) * idf[term];
    v.push_back({term, w});
    norm2 += w * w;
  }
  const double norm = std::sqrt(norm2);
  if (norm > 0.0) {
    for (auto& e : v) e.weight /= norm;
  }
  return v;
}

}  // namespace

SparseVector TfIdfIndex::vectorize(std::string_view text) const {
  std::map<std::uint32_t, int> counts;
  for (const auto& tok : tokenize_text(text, tokenizer_)) {
    if (auto id = term_id(tok)) ++counts[*id];
  }
  return weigh(counts, idf_);
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].term < b[j].term) {
      ++i;
    } else if (b[j].term < a[i].term) {
      ++j;
    } else {
      s += a[i++].weight * b[j++].weight;
    }
  }
  return s;
}

TfIdfIndex build_index(const LibraryCatalog& catalog, const TokenizerConfig& tokenizer) {
  if (catalog.empty()) throw EmptyIndexError("catalog is empty");
  std::vector<std::string> packages;
  std::vector<std::map<std::string, int>> doc_counts;
  std::map<std::string, int> df;
  for (const auto& [package, description] : catalog.entries()) {
    std::map<std::string, int> counts;
    for (auto& tok : tokenize_text(description, tokenizer)) ++counts[tok];
    if (counts.empty()) continue;
    for (const auto& [term, _] : counts) ++df[term];
    packages.push_back(package);
    doc_counts.push_back(std::move(counts));
  }
  if (packages.empty()) throw EmptyIndexError("no catalog description contains an indexable term");

  std::vector<std::string> terms;
  std::vector<double> idf;
  const auto n_docs = static_cast<double>(packages.size());
  for (const auto& [term, f] : df) {
    terms.push_back(term);
    idf.push_back(std::log((1.0 + n_docs) / (1.0 + f)) + 1.0);
  }
  std::vector<SparseVector> docs;
  for (const auto& counts : doc_counts) {
    std::map<std::uint32_t, int> by_id;
    for (const auto& [term, c] : counts) {
      const auto it = std::lower_bound(terms.begin(), terms.end(), term);
      by_id[static_cast<std::uint32_t>(it - terms.begin())] = c;
    }
    docs.push_back(weigh(by_id, idf));
  }
  return TfIdfIndex(std::move(terms), std::move(idf), std::move(packages), std::move(docs), tokenizer);
}

std::vector<Recommendation> query_index(const TfIdfIndex& index, std::string_view text, int k) {
  if (k < 1) throw InvalidArgumentError("k must be >= 1");
  const auto query = index.vectorize(text);
  if (query.empty()) return {};
  struct Scored {
    std::size_t doc;
    double score;
  };
  std::vector<Scored> scored;
  for (std::size_t d = 0; d < index.size(); ++d) {
    const double s = quantize_score(sparse_dot(query, index.doc_vector(d)));
    if (s > 0.0) scored.push_back({d, s});
  }
  // packages are sorted, so a stable sort on score keeps names ascending
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(static_cast<std::size_t>(k));
  std::vector<Recommendation> out;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    out.push_back({index.packages()[scored[i].doc], scored[i].score, RecommendationKind::alternative,
                   static_cast<int>(i + 1), false});
  }
  return out;
}

}  // namespace pkgrec
