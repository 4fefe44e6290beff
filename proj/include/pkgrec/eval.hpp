#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pkgrec/altrec.hpp"
#include "pkgrec/corpus.hpp"
#include "pkgrec/embed.hpp"

namespace pkgrec {

struct EvalConfig {
  std::vector<int> ks{5, 10};
  std::uint64_t seed = 0;
  int min_imports = 2;
  void validate() const;
};

struct EvalReport {
  std::string protocol;  // "loo", "soft" or "hard"
  std::string metric;    // what a hit means, written into the report
  std::uint64_t seed = 0;
  std::vector<std::pair<int, double>> accuracy;  // (k, accuracy), k ascending
  std::size_t n_evaluated = 0;
  std::size_t n_skipped = 0;

  double accuracy_at(int k) const;
};

/// {"protocol", "metric", "seed", "metrics": {"top5": ...}, "n_evaluated", "n_skipped"}
std::string to_json(const EvalReport& report);
std::string to_table(const EvalReport& report);

/// For every record with at least min_imports known packages, removes one of
/// them at random (seeded per record) and checks whether recommend_complementary
/// on the rest ranks it within the top k. Throws NoEvaluableFilesError.
EvalReport eval_complementary_leave_one_out(const Corpus& corpus, const EmbeddingModel& model, const EvalConfig& cfg);

/// Soft labels: the truth list is the index's top k_truth for the unit's
/// docstrings; the prediction is the top k for the code with docstrings
/// stripped. A hit is a non-empty overlap. Units without docstrings (or whose
/// docstrings retrieve nothing) are skipped.
EvalReport eval_alternative_soft(const std::vector<SourceUnit>& units, const TfIdfIndex& index,
                                 const Summarizer& summarizer, int k, int k_truth = 5);

struct HardLabel {
  std::string path;
  PackageSet expected;
};
using HardLabelSet = std::vector<HardLabel>;

/// {"path": ..., "expected": [...]} per line.
HardLabelSet read_hard_labels(const std::filesystem::path& path);

/// Hit iff the top-k alternatives intersect the annotated set. Relative label
/// paths resolve against `base_dir`. Throws LabelResolutionError naming every
/// path that cannot be read.
EvalReport eval_alternative_hard(const HardLabelSet& labels, const std::filesystem::path& base_dir,
                                 const TfIdfIndex& index, const Summarizer& summarizer, int k);

/// Seeded file-level split into (train, held_out).
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double held_out_fraction, std::uint64_t seed);

}  // namespace pkgrec
