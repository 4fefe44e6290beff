#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pkgrec/cooccur.hpp"

namespace pkgrec {

enum class LrSchedule { constant, linear_decay };

struct TrainConfig {
  int dim = 64;
  int epochs = 10;
  double learning_rate = 0.1;
  LrSchedule lr_schedule = LrSchedule::linear_decay;
  int negatives = 5;
  std::uint64_t seed = 42;
  SamplerOptions sampler;
  /// Permits negatives == 0. Only meaningful for tests of the positive term.
  bool allow_zero_negatives = false;

  /// Throws InvalidArgumentError when an invariant does not hold.
  void validate() const;
};

struct TrainingLog {
  std::vector<double> epoch_losses;  // mean directed-pair loss per epoch
  std::size_t steps = 0;
  std::size_t fallback_negatives = 0;
  std::size_t missing_negatives = 0;
};

/// Target (U) and context (C) vectors, one row per vocabulary entry, stored
/// row-major as 32-bit floats. Recommendation similarity uses U only.
class EmbeddingModel {
 public:
  EmbeddingModel(Vocabulary vocab, int dim, std::vector<float> target, std::vector<float> context,
                 TrainConfig config = {}, TrainingLog log = {});

  const Vocabulary& vocab() const noexcept { return vocab_; }
  int dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return vocab_.size(); }

  std::span<const float> target(int id) const;
  std::span<const float> context(int id) const;
  std::span<const float> target_matrix() const noexcept { return target_; }
  std::span<const float> context_matrix() const noexcept { return context_; }

  const TrainConfig& config() const noexcept { return config_; }
  const TrainingLog& log() const noexcept { return log_; }

 private:
  Vocabulary vocab_;
  int dim_;
  std::vector<float> target_;
  std::vector<float> context_;
  TrainConfig config_;
  TrainingLog log_;
};

double sigmoid(double x);
/// log(1 + e^x) without overflow.
double softplus(double x);

/// -log sigma(u.v) - sum_n log sigma(-u.v_n). Throws DimensionError on
/// mismatched lengths.
double sgns_loss(std::span<const double> u, std::span<const double> v, std::span<const std::vector<double>> negs);

struct SgnsGradient {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<std::vector<double>> negs;
};

/// Analytic gradient of sgns_loss with respect to every argument.
SgnsGradient sgns_gradient(std::span<const double> u, std::span<const double> v,
                           std::span<const std::vector<double>> negs);

/// SGNS over the positive pairs in `stats`. Every pair (i, j) is visited
/// ceil(log(1 + c(i,j))) times per epoch in a seeded shuffled order, with one
/// SGD step in each direction. Single-threaded and deterministic.
EmbeddingModel train(const PairStats& stats, const Vocabulary& vocab, const TrainConfig& config);

/// Model with seeded uniform vectors and no training; a baseline for evaluation.
EmbeddingModel random_model(const Vocabulary& vocab, int dim, std::uint64_t seed);

/// a.b / (|a||b|), clamped to [-1, 1]. Throws ZeroVectorError and DimensionError.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const float> a, std::span<const float> b);

struct ProjectionRequest {
  /// (package, number of files in which it co-occurred with the new package)
  std::vector<std::pair<std::string, std::int64_t>> neighbors;
};

struct Projection {
  std::vector<double> vector;
  std::size_t dropped_neighbors = 0;  // names not in the vocabulary
};

/// Places an unseen package at the co-occurrence-weighted mean of its known
/// neighbours' target vectors: sum(w_i U_i) / sum(w_i).
Projection project_out_of_sample(const ProjectionRequest& request, const EmbeddingModel& model);

/// Copy of `model` with `name` appended; its target row is `vector` and its
/// context row is zero.
EmbeddingModel with_inserted(const EmbeddingModel& model, const std::string& name, std::span<const double> vector,
                             std::int64_t freq = 0);

const char* to_string(LrSchedule schedule);
LrSchedule lr_schedule_from_string(const std::string& name);

}  // namespace pkgrec
