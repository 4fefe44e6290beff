#include "pkgrec/embed.hpp"

#include <algorithm>
#include <cmath>

#include "pkgrec/error.hpp"
#include "pkgrec/rng.hpp"

namespace pkgrec {

void TrainConfig::validate() const {
  if (dim < 2) throw InvalidArgumentError("dim must be >= 2");
  if (epochs < 1) throw InvalidArgumentError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgumentError("learning_rate must be > 0");
  if (negatives < 0 || (negatives == 0 && !allow_zero_negatives)) {
    throw InvalidArgumentError("negatives_per_positive must be >= 1");
  }
}

EmbeddingModel::EmbeddingModel(Vocabulary vocab, int dim, std::vector<float> target, std::vector<float> context,
                               TrainConfig config, TrainingLog log)
    : vocab_(std::move(vocab)),
      dim_(dim),
      target_(std::move(target)),
      context_(std::move(context)),
      config_(config),
      log_(std::move(log)) {
  if (dim_ < 1) throw InvalidArgumentError("embedding dim must be positive");
  const auto expected = vocab_.size() * static_cast<std::size_t>(dim_);
  if (target_.size() != expected || context_.size() != expected) {
    throw DimensionError("embedding matrices must have " + std::to_string(vocab_.size()) + " rows of " +
                         std::to_string(dim_));
  }
}

std::span<const float> EmbeddingModel::target(int id) const {
  return std::span<const float>(target_).subspan(static_cast<std::size_t>(id) * dim_, dim_);
}

std::span<const float> EmbeddingModel::context(int id) const {
  return std::span<const float>(context_).subspan(static_cast<std::size_t>(id) * dim_, dim_);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

namespace {

template <typename A, typename B>
double dot(std::span<A> a, std::span<B> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

void check_dims(std::span<const double> u, std::span<const double> v, std::span<const std::vector<double>> negs) {
  if (v.size() != u.size()) throw DimensionError("u and v differ in length");
  for (const auto& n : negs) {
    if (n.size() != u.size()) throw DimensionError("negative vector length differs from u");
  }
}

}  // namespace

double sgns_loss(std::span<const double> u, std::span<const double> v, std::span<const std::vector<double>> negs) {
  check_dims(u, v, negs);
  // -log sigma(x) = softplus(-x); -log sigma(-x) = softplus(x)
  double loss = softplus(-dot(u, v));
  for (const auto& n : negs) loss += softplus(dot(u, std::span<const double>(n)));
  return loss;
}

SgnsGradient sgns_gradient(std::span<const double> u, std::span<const double> v,
                           std::span<const std::vector<double>> negs) {
  check_dims(u, v, negs);
  const std::size_t d = u.size();
  SgnsGradient g;
  const double g_pos = sigmoid(dot(u, v)) - 1.0;
  g.u.assign(d, 0.0);
  g.v.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    g.u[i] += g_pos * v[i];
    g.v[i] = g_pos * u[i];
  }
  for (const auto& n : negs) {
    const double g_neg = sigmoid(dot(u, std::span<const double>(n)));
    std::vector<double> gn(d);
    for (std::size_t i = 0; i < d; ++i) {
      g.u[i] += g_neg * n[i];
      gn[i] = g_neg * u[i];
    }
    g.negs.push_back(std::move(gn));
  }
  return g;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine of vectors with different lengths");
  const double aa = dot(a, a);
  const double bb = dot(b, b);
  if (aa == 0.0 || bb == 0.0) throw ZeroVectorError("cosine of a zero-norm vector");
  // sqrt(aa * aa) == aa exactly, so identical vectors score exactly 1
  return std::clamp(dot(a, b) / std::sqrt(aa * bb), -1.0, 1.0);
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw DimensionError("cosine of vectors with different lengths");
  const double aa = dot(a, a);
  const double bb = dot(b, b);
  if (aa == 0.0 || bb == 0.0) throw ZeroVectorError("cosine of a zero-norm vector");
  return std::clamp(dot(a, b) / std::sqrt(aa * bb), -1.0, 1.0);
}

namespace {

std::vector<float> uniform_matrix(std::size_t rows, int dim, Rng& rng) {
  const double half = 0.5 / dim;
  std::vector<float> m(rows * static_cast<std::size_t>(dim));
  for (auto& x : m) x = static_cast<float>(rng.uniform(-half, half));
  return m;
}

bool all_finite(std::span<const float> row) {
  return std::all_of(row.begin(), row.end(), [](float x) { return std::isfinite(x); });
}

struct Visit {
  int a;
  int b;
};

}  // namespace

EmbeddingModel random_model(const Vocabulary& vocab, int dim, std::uint64_t seed) {
  if (dim < 1) throw InvalidArgumentError("dim must be positive");
  Rng rng(seed);
  auto u = uniform_matrix(vocab.size(), dim, rng);
  auto c = uniform_matrix(vocab.size(), dim, rng);
  TrainConfig cfg;
  cfg.dim = dim;
  cfg.seed = seed;
  return EmbeddingModel(vocab, dim, std::move(u), std::move(c), cfg);
}

EmbeddingModel train(const PairStats& stats, const Vocabulary& vocab, const TrainConfig& config) {
  config.validate();
  if (stats.empty()) throw InvalidArgumentError("training needs at least one positive pair");
  const auto d = static_cast<std::size_t>(config.dim);
  const auto rows = vocab.size();

  Rng init_rng(config.seed);
  auto U = uniform_matrix(rows, config.dim, init_rng);
  auto C = uniform_matrix(rows, config.dim, init_rng);

  std::optional<NegativeSampler> sampler;
  if (config.negatives > 0) sampler.emplace(vocab, stats, config.sampler, mix_seed(config.seed, 1));
  Rng order_rng(mix_seed(config.seed, 2));

  std::vector<Visit> visits;
  for (const auto& e : stats.entries()) {
    if (e.first < 0 || static_cast<std::size_t>(e.second) >= rows) {
      throw InvalidArgumentError("pair statistics reference ids outside the vocabulary");
    }
    const auto times = static_cast<std::size_t>(std::ceil(std::log1p(static_cast<double>(e.count))));
    for (std::size_t t = 0; t < times; ++t) visits.push_back({e.first, e.second});
  }

  const double total_steps = static_cast<double>(visits.size()) * 2.0 * config.epochs;
  std::size_t step = 0;
  TrainingLog log;
  std::vector<int> negs;
  std::vector<double> grad_target(d);

  auto row = [d](std::vector<float>& m, int id) { return std::span<float>(m).subspan(static_cast<std::size_t>(id) * d, d); };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(std::span<Visit>(visits));
    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;

    for (const auto& visit : visits) {
      for (int dir = 0; dir < 2; ++dir) {
        const int t = dir == 0 ? visit.a : visit.b;
        const int c = dir == 0 ? visit.b : visit.a;
        double lr = config.learning_rate;
        if (config.lr_schedule == LrSchedule::linear_decay) {
          lr *= std::max(1e-4, 1.0 - static_cast<double>(step) / total_steps);
        }

        negs.clear();
        for (int k = 0; k < config.negatives; ++k) {
          if (auto n = sampler->negative_for(t)) negs.push_back(*n);
        }

        auto u = row(U, t);
        auto v = row(C, c);
        const double dot_pos = dot(std::span<const float>(u), std::span<const float>(v));
        const double g_pos = sigmoid(dot_pos) - 1.0;
        double loss = softplus(-dot_pos);
        for (std::size_t i = 0; i < d; ++i) grad_target[i] = g_pos * v[i];
        for (std::size_t i = 0; i < d; ++i) v[i] = static_cast<float>(v[i] - lr * g_pos * u[i]);

        for (int n : negs) {
          auto vn = row(C, n);
          const double dot_neg = dot(std::span<const float>(u), std::span<const float>(vn));
          const double g_neg = sigmoid(dot_neg);
          loss += softplus(dot_neg);
          for (std::size_t i = 0; i < d; ++i) grad_target[i] += g_neg * vn[i];
          for (std::size_t i = 0; i < d; ++i) vn[i] = static_cast<float>(vn[i] - lr * g_neg * u[i]);
          if (!all_finite(vn)) throw TrainingDivergedError(epoch, t, c);
        }
        for (std::size_t i = 0; i < d; ++i) u[i] = static_cast<float>(u[i] - lr * grad_target[i]);

        if (!std::isfinite(loss) || !all_finite(u) || !all_finite(v)) throw TrainingDivergedError(epoch, t, c);
        epoch_loss += loss;
        ++epoch_steps;
        ++step;
      }
    }
    log.epoch_losses.push_back(epoch_steps > 0 ? epoch_loss / static_cast<double>(epoch_steps) : 0.0);
  }

  log.steps = step;
  if (sampler) {
    log.fallback_negatives = sampler->fallback_count();
    log.missing_negatives = sampler->exhausted_count();
  }
  return EmbeddingModel(vocab, config.dim, std::move(U), std::move(C), config, std::move(log));
}

Projection project_out_of_sample(const ProjectionRequest& request, const EmbeddingModel& model) {
  if (request.neighbors.empty()) throw InvalidArgumentError("projection needs at least one neighbour");
  const auto d = static_cast<std::size_t>(model.dim());
  Projection out;
  out.vector.assign(d, 0.0);
  double weight_sum = 0.0;
  for (const auto& [name, weight] : request.neighbors) {
    if (weight < 1) throw InvalidArgumentError("neighbour weight for '" + name + "' must be >= 1");
    const auto id = model.vocab().find(name);
    if (!id) {
      ++out.dropped_neighbors;
      continue;
    }
    const auto p = model.target(*id);
    const auto w = static_cast<double>(weight);
    for (std::size_t i = 0; i < d; ++i) out.vector[i] += w * static_cast<double>(p[i]);
    weight_sum += w;
  }
  if (weight_sum == 0.0) throw NoKnownNeighborsError("none of the neighbours is in the vocabulary");
  for (auto& x : out.vector) x /= weight_sum;
  return out;
}

EmbeddingModel with_inserted(const EmbeddingModel& model, const std::string& name, std::span<const double> vector,
                             std::int64_t freq) {
  if (vector.size() != static_cast<std::size_t>(model.dim())) throw DimensionError("inserted vector has wrong length");
  if (!is_canonical_package_name(name)) throw InvalidArgumentError("invalid package name '" + name + "'");
  if (model.vocab().contains(name)) throw InvalidArgumentError("'" + name + "' is already in the vocabulary");
  std::vector<float> u(model.target_matrix().begin(), model.target_matrix().end());
  std::vector<float> c(model.context_matrix().begin(), model.context_matrix().end());
  for (double x : vector) u.push_back(static_cast<float>(x));
  c.resize(c.size() + vector.size(), 0.0f);
  return EmbeddingModel(model.vocab().with_appended(name, freq), model.dim(), std::move(u), std::move(c),
                        model.config(), model.log());
}

const char* to_string(LrSchedule schedule) {
  return schedule == LrSchedule::constant ? "constant" : "linear_decay";
}

LrSchedule lr_schedule_from_string(const std::string& name) {
  if (name == "constant") return LrSchedule::constant;
  if (name == "linear_decay") return LrSchedule::linear_decay;
  throw InvalidArgumentError("unknown lr schedule '" + name + "'");
}

}  // namespace pkgrec
