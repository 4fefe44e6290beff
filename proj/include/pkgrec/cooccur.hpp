#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pkgrec/corpus.hpp"
#include "pkgrec/rng.hpp"

namespace pkgrec {

/// Packages retained for training, ordered by descending file frequency with
/// ties broken lexicographically. Ids are positions in `packages`.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Validates and indexes an already-ordered vocabulary (used when loading).
  Vocabulary(std::vector<std::string> packages, std::vector<std::int64_t> freq, int min_count);

  std::size_t size() const noexcept { return packages_.size(); }
  bool empty() const noexcept { return packages_.empty(); }
  const std::string& name(int id) const { return packages_.at(static_cast<std::size_t>(id)); }
  std::int64_t freq(int id) const { return freq_.at(static_cast<std::size_t>(id)); }
  std::optional<int> find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }

  const std::vector<std::string>& packages() const noexcept { return packages_; }
  const std::vector<std::int64_t>& frequencies() const noexcept { return freq_; }
  int min_count() const noexcept { return min_count_; }

  /// Copy with one extra package appended at the end (id = old size).
  Vocabulary with_appended(std::string name, std::int64_t freq) const;

  bool operator==(const Vocabulary& other) const {
    return packages_ == other.packages_ && freq_ == other.freq_ && min_count_ == other.min_count_;
  }

 private:
  std::vector<std::string> packages_;
  std::vector<std::int64_t> freq_;
  std::unordered_map<std::string, int> index_;
  int min_count_ = 1;
};

/// Keeps packages imported by at least `min_count` files and not in
/// `stop_list`. Throws EmptyVocabularyError if nothing survives.
Vocabulary build_vocabulary(const Corpus& corpus, int min_count, const PackageSet& stop_list = {});

struct PairCount {
  int first;   // first < second
  int second;
  std::int64_t count;
  bool operator==(const PairCount&) const = default;
};

/// Number of files in which two vocabulary packages are imported together.
/// Only i < j is stored; the relation is symmetric.
class PairStats {
 public:
  PairStats() = default;
  explicit PairStats(std::vector<PairCount> entries);

  /// c(a, b); zero for a == b or pairs never seen together.
  std::int64_t count(int a, int b) const;

  std::span<const PairCount> entries() const noexcept { return entries_; }
  std::int64_t total_pairs() const noexcept { return total_pairs_; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<PairCount> entries_;  // sorted by (first, second)
  std::int64_t total_pairs_ = 0;
};

PairStats build_pair_stats(const Corpus& corpus, const Vocabulary& vocab);

struct SamplerOptions {
  double exponent = 0.75;
  /// A candidate n is a valid negative for t when c(t, n) <= reject_threshold.
  std::int64_t reject_threshold = 0;
  int max_retries = 32;
  /// When retries run out, take the lowest-co-occurrence candidate seen;
  /// otherwise report no negative.
  bool allow_fallback = true;
};

/// Draws package ids with probability proportional to freq^exponent and
/// filters them into negatives by co-occurrence. Holds RNG state; use one
/// instance per thread. Keeps a reference to `stats`, which must outlive it.
class NegativeSampler {
 public:
  NegativeSampler(const Vocabulary& vocab, const PairStats& stats, SamplerOptions options, std::uint64_t seed);

  /// One draw from the smoothed unigram distribution, no rejection.
  int draw();

  /// A negative for `target`, or nullopt if none was found and fallback is off.
  std::optional<int> negative_for(int target);

  std::span<const double> probabilities() const noexcept { return probabilities_; }
  std::size_t fallback_count() const noexcept { return fallbacks_; }
  std::size_t exhausted_count() const noexcept { return exhausted_; }
  const SamplerOptions& options() const noexcept { return options_; }

 private:
  const PairStats* stats_;
  SamplerOptions options_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
  Rng rng_;
  std::size_t fallbacks_ = 0;
  std::size_t exhausted_ = 0;
};

NegativeSampler make_negative_sampler(const Vocabulary& vocab, const PairStats& stats, double exponent,
                                      std::uint64_t seed);

}  // namespace pkgrec
