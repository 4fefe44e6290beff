#include "pkgrec/altrec.hpp"

#include "pkgrec/error.hpp"

namespace pkgrec {

std::vector<Recommendation> rank_alternatives(const CodeSummary& summary, const PackageSet& imports,
                                              const TfIdfIndex& index, int k, const AlternativeOptions& options) {
  if (k < 1) throw InvalidArgumentError("k must be >= 1");
  const int fetch = options.filter_imported ? static_cast<int>(std::max<std::size_t>(index.size(), 1)) : k;
  std::vector<Recommendation> out;
  for (auto& rec : query_index(index, summary.text, fetch)) {
    rec.already_imported = imports.contains(rec.package);
    if (options.filter_imported && rec.already_imported) continue;
    rec.rank = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(rec));
    if (out.size() == static_cast<std::size_t>(k)) break;
  }
  return out;
}

AlternativeResult recommend_alternative(std::string_view source_text, const TfIdfIndex& index,
                                        const Summarizer& summarizer, int k, const AlternativeOptions& options) {
  AlternativeResult result;
  result.summary = summarizer.summarize(source_text, "file");
  result.recommendations = rank_alternatives(result.summary, extract_imports(source_text), index, k, options);
  return result;
}

AlternativeResult recommend_alternative(const SourceUnit& unit, const TfIdfIndex& index, const Summarizer& summarizer,
                                        int k, const AlternativeOptions& options) {
  if (unit.kind == SourceKind::script) return recommend_alternative(unit.text, index, summarizer, k, options);
  std::vector<std::pair<std::string, std::string>> cells;
  for (auto& cell : extract_notebook_sources(unit.text)) {
    cells.emplace_back("cell-" + std::to_string(cells.size()), std::move(cell));
  }
  AlternativeResult result;
  result.summary = summarize_units(summarizer, cells);
  result.recommendations = rank_alternatives(result.summary, unit_imports(unit), index, k, options);
  return result;
}

}  // namespace pkgrec
