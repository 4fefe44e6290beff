#pragma once

#include <cstdint>
#include <vector>

#include "pkgrec/corpus.hpp"
#include "pkgrec/embed.hpp"
#include "pkgrec/recommendation.hpp"

namespace pkgrec {

struct ComplementOptions {
  /// Candidates imported by fewer files are skipped. 0 disables the filter.
  std::int64_t min_frequency = 0;
};

/// Ranks every vocabulary package not in `imports` by its mean cosine
/// similarity (target vectors) to the known imports, and returns the top k.
/// Ties go to the more frequent package, then the lexicographically smaller
/// name. Throws NoKnownImportsError if no import is in the vocabulary.
std::vector<Recommendation> recommend_complementary(const PackageSet& imports, const EmbeddingModel& model, int k,
                                                    const ComplementOptions& options = {});

}  // namespace pkgrec
