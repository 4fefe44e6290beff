#include "pkgrec/complement.hpp"

#include <algorithm>

#include "pkgrec/error.hpp"

namespace pkgrec {

const char* to_string(RecommendationKind kind) {
  return kind == RecommendationKind::complementary ? "complementary" : "alternative";
}

std::vector<Recommendation> recommend_complementary(const PackageSet& imports, const EmbeddingModel& model, int k,
                                                    const ComplementOptions& options) {
  if (k < 1) throw InvalidArgumentError("k must be >= 1");
  const auto& vocab = model.vocab();
  std::vector<int> known;
  for (const auto& name : imports) {
    if (auto id = vocab.find(name)) known.push_back(*id);
  }
  if (known.empty()) throw NoKnownImportsError("none of the imports is in the model vocabulary");
  std::sort(known.begin(), known.end());

  struct Scored {
    int id;
    double score;
  };
  std::vector<Scored> scored;
  for (int c = 0; c < static_cast<int>(vocab.size()); ++c) {
    if (imports.contains(vocab.name(c))) continue;
    if (options.min_frequency > 0 && vocab.freq(c) < options.min_frequency) continue;
    double sum = 0.0;
    for (int s : known) sum += cosine(model.target(c), model.target(s));
    scored.push_back({c, quantize_score(sum / static_cast<double>(known.size()))});
  }
  std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (vocab.freq(a.id) != vocab.freq(b.id)) return vocab.freq(a.id) > vocab.freq(b.id);
    return vocab.name(a.id) < vocab.name(b.id);
  });
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(static_cast<std::size_t>(k));

  std::vector<Recommendation> out;
  out.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    out.push_back({vocab.name(scored[i].id), scored[i].score, RecommendationKind::complementary,
                   static_cast<int>(i + 1), false});
  }
  return out;
}

}  // namespace pkgrec
