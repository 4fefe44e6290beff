#pragma once

#include <string_view>
#include <vector>

#include "pkgrec/corpus.hpp"
#include "pkgrec/recommendation.hpp"
#include "pkgrec/summarize.hpp"
#include "pkgrec/tfidf.hpp"

namespace pkgrec {

struct AlternativeOptions {
  /// Drop packages the code already imports instead of only flagging them.
  bool filter_imported = false;
};

struct AlternativeResult {
  std::vector<Recommendation> recommendations;
  CodeSummary summary;
};

/// Summarises the code and retrieves matching packages from the index.
/// Packages the code already imports are flagged via `already_imported`.
AlternativeResult recommend_alternative(std::string_view source_text, const TfIdfIndex& index,
                                        const Summarizer& summarizer, int k, const AlternativeOptions& options = {});

/// Notebooks are summarised cell by cell ("cell-0", "cell-1", ...).
AlternativeResult recommend_alternative(const SourceUnit& unit, const TfIdfIndex& index, const Summarizer& summarizer,
                                        int k, const AlternativeOptions& options = {});

/// Ranks an existing summary; shared by both overloads.
std::vector<Recommendation> rank_alternatives(const CodeSummary& summary, const PackageSet& imports,
                                              const TfIdfIndex& index, int k, const AlternativeOptions& options);

}  // namespace pkgrec
