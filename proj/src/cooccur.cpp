#include "pkgrec/cooccur.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pkgrec/error.hpp"

namespace pkgrec {

Vocabulary::Vocabulary(std::vector<std::string> packages, std::vector<std::int64_t> freq, int min_count)
    : packages_(std::move(packages)), freq_(std::move(freq)), min_count_(min_count) {
  if (packages_.size() != freq_.size()) throw InvalidArgumentError("vocabulary names/frequencies length mismatch");
  index_.reserve(packages_.size());
  for (std::size_t i = 0; i < packages_.size(); ++i) {
    if (!index_.emplace(packages_[i], static_cast<int>(i)).second) {
      throw InvalidArgumentError("duplicate vocabulary entry '" + packages_[i] + "'");
    }
  }
}

std::optional<int> Vocabulary::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::with_appended(std::string name, std::int64_t freq) const {
  auto names = packages_;
  auto freqs = freq_;
  names.push_back(std::move(name));
  freqs.push_back(freq);
  return Vocabulary(std::move(names), std::move(freqs), min_count_);
}

Vocabulary build_vocabulary(const Corpus& corpus, int min_count, const PackageSet& stop_list) {
  if (min_count < 1) throw InvalidArgumentError("min_count must be >= 1");
  std::map<std::string, std::int64_t> counts;
  for (const auto& rec : corpus.records) {
    for (const auto& p : rec.packages) ++counts[p];
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [name, c] : counts) {
    if (c >= min_count && !stop_list.contains(name)) kept.emplace_back(name, c);
  }
  if (kept.empty()) throw EmptyVocabularyError("no package reaches min_count=" + std::to_string(min_count));
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> names;
  std::vector<std::int64_t> freqs;
  for (auto& [name, c] : kept) {
    names.push_back(std::move(name));
    freqs.push_back(c);
  }
  return Vocabulary(std::move(names), std::move(freqs), min_count);
}

PairStats::PairStats(std::vector<PairCount> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const PairCount& a, const PairCount& b) { return std::tie(a.first, a.second) < std::tie(b.first, b.second); });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.first >= e.second) throw InvalidArgumentError("pair entries must satisfy first < second");
    if (e.count < 1) throw InvalidArgumentError("pair counts must be >= 1");
    if (i > 0 && entries_[i - 1].first == e.first && entries_[i - 1].second == e.second) {
      throw InvalidArgumentError("duplicate pair entry");
    }
    total_pairs_ += e.count;
  }
}

std::int64_t PairStats::count(int a, int b) const {
  if (a == b) return 0;
  if (a > b) std::swap(a, b);
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{a, b},
                                   [](const PairCount& e, const std::pair<int, int>& key) {
                                     return std::tie(e.first, e.second) < std::tie(key.first, key.second);
                                   });
  if (it == entries_.end() || it->first != a || it->second != b) return 0;
  return it->count;
}

PairStats build_pair_stats(const Corpus& corpus, const Vocabulary& vocab) {
  if (vocab.empty()) throw EmptyVocabularyError("pair statistics need a non-empty vocabulary");
  std::map<std::pair<int, int>, std::int64_t> counts;
  std::vector<int> ids;
  for (const auto& rec : corpus.records) {
    ids.clear();
    for (const auto& p : rec.packages) {
      if (auto id = vocab.find(p)) ids.push_back(*id);
    }
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) ++counts[{ids[i], ids[j]}];
    }
  }
  std::vector<PairCount> entries;
  entries.reserve(counts.size());
  for (const auto& [key, c] : counts) entries.push_back({key.first, key.second, c});
  return PairStats(std::move(entries));
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, const PairStats& stats, SamplerOptions options,
                                 std::uint64_t seed)
    : stats_(&stats), options_(options), rng_(seed) {
  if (vocab.size() < 2) throw DegenerateSamplerError("negative sampling needs at least two packages");
  if (!(options_.exponent > 0.0 && options_.exponent <= 1.0)) {
    throw InvalidArgumentError("sampler exponent must be in (0, 1]");
  }
  if (options_.max_retries < 1) throw InvalidArgumentError("max_retries must be >= 1");
  probabilities_.resize(vocab.size());
  double total = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    probabilities_[i] = std::pow(static_cast<double>(vocab.freq(static_cast<int>(i))), options_.exponent);
    total += probabilities_[i];
  }
  cumulative_.resize(vocab.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    probabilities_[i] /= total;
    acc += probabilities_[i];
    cumulative_[i] = acc;
  }
  cumulative_.back() = 1.0;
}

int NegativeSampler::draw() {
  const double u = rng_.uniform01();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(), std::ssize(cumulative_) - 1));
}

std::optional<int> NegativeSampler::negative_for(int target) {
  int best = -1;
  std::int64_t best_count = 0;
  for (int attempt = 0; attempt < options_.max_retries; ++attempt) {
    const int candidate = draw();
    if (candidate == target) continue;
    const auto c = stats_->count(target, candidate);
    if (c <= options_.reject_threshold) return candidate;
    if (best < 0 || c < best_count) {
      best = candidate;
      best_count = c;
    }
  }
  if (!options_.allow_fallback) {
    ++exhausted_;
    return std::nullopt;
  }
  ++fallbacks_;
  if (best < 0) {
    const auto n = cumulative_.size();
    best = static_cast<int>((static_cast<std::size_t>(target) + 1 + rng_.below(n - 1)) % n);
  }
  return best;
}

NegativeSampler make_negative_sampler(const Vocabulary& vocab, const PairStats& stats, double exponent,
                                      std::uint64_t seed) {
  SamplerOptions options;
  options.exponent = exponent;
  return NegativeSampler(vocab, stats, options, seed);
}

}  // namespace pkgrec
