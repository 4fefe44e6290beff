#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace pkgrec {

enum class RecommendationKind { complementary, alternative };

struct Recommendation {
  std::string package;
  double score = 0.0;
  RecommendationKind kind = RecommendationKind::complementary;
  int rank = 0;  // 1-based
  /// Alternative recommendations only: the package is already imported by
  /// the analysed code.
  bool already_imported = false;
};

const char* to_string(RecommendationKind kind);

/// Scores are ranked and reported on a 1e-12 grid. Values that are equal in
/// exact arithmetic but reached by different rounding paths then tie, and
/// the documented tie-break decides their order.
inline double quantize_score(double score) { return std::round(score * 1e12) / 1e12; }

}  // namespace pkgrec
