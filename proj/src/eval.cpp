#include "pkgrec/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pkgrec/complement.hpp"
#include "pkgrec/error.hpp"
#include "pkgrec/rng.hpp"

namespace pkgrec {

void EvalConfig::validate() const {
  if (ks.empty()) throw InvalidArgumentError("at least one k is required");
  if (!std::is_sorted(ks.begin(), ks.end()) || std::adjacent_find(ks.begin(), ks.end()) != ks.end()) {
    throw InvalidArgumentError("ks must be strictly ascending");
  }
  if (ks.front() < 1) throw InvalidArgumentError("k must be >= 1");
  if (min_imports < 2) throw InvalidArgumentError("min_imports must be >= 2");
}

double EvalReport::accuracy_at(int k) const {
  for (const auto& [kk, acc] : accuracy) {
    if (kk == k) return acc;
  }
  throw InvalidArgumentError("report has no accuracy for k=" + std::to_string(k));
}

std::string to_json(const EvalReport& report) {
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (const auto& [k, acc] : report.accuracy) metrics["top" + std::to_string(k)] = acc;
  nlohmann::ordered_json j;
  j["protocol"] = report.protocol;
  j["metric"] = report.metric;
  j["seed"] = report.seed;
  j["metrics"] = metrics;
  j["n_evaluated"] = report.n_evaluated;
  j["n_skipped"] = report.n_skipped;
  return j.dump(2);
}

std::string to_table(const EvalReport& report) {
  std::ostringstream out;
  char buf[64];
  out << "protocol     " << report.protocol << '\n' << "metric       " << report.metric << '\n';
  out << "seed         " << report.seed << '\n';
  out << "evaluated    " << report.n_evaluated << '\n' << "skipped      " << report.n_skipped << '\n';
  for (const auto& [k, acc] : report.accuracy) {
    std::snprintf(buf, sizeof buf, "top-%-8d %.4f\n", k, acc);
    out << buf;
  }
  return out.str();
}

namespace {

void finish(EvalReport& report, const std::vector<std::size_t>& hits) {
  for (std::size_t i = 0; i < hits.size(); ++i) {
    report.accuracy[i].second = static_cast<double>(hits[i]) / static_cast<double>(report.n_evaluated);
  }
}

bool intersects(const std::vector<Recommendation>& recs, const PackageSet& names) {
  return std::any_of(recs.begin(), recs.end(), [&](const Recommendation& r) { return names.contains(r.package); });
}

}  // namespace

EvalReport eval_complementary_leave_one_out(const Corpus& corpus, const EmbeddingModel& model, const EvalConfig& cfg) {
  cfg.validate();
  EvalReport report;
  report.protocol = "loo";
  report.metric = "hit@k: held-out import ranked within top k";
  report.seed = cfg.seed;
  for (int k : cfg.ks) report.accuracy.emplace_back(k, 0.0);
  std::vector<std::size_t> hits(cfg.ks.size(), 0);
  const int k_max = cfg.ks.back();

  for (std::size_t f = 0; f < corpus.records.size(); ++f) {
    const auto& rec = corpus.records[f];
    std::vector<std::string> known;
    for (const auto& p : rec.packages) {
      if (model.vocab().contains(p)) known.push_back(p);
    }
    if (known.size() < static_cast<std::size_t>(cfg.min_imports)) {
      ++report.n_skipped;
      continue;
    }
    Rng rng(mix_seed(cfg.seed, f));
    const auto& removed = known[rng.below(known.size())];
    PackageSet rest = rec.packages;
    rest.erase(removed);
    const auto recs = recommend_complementary(rest, model, k_max);
    const auto it = std::find_if(recs.begin(), recs.end(), [&](const Recommendation& r) { return r.package == removed; });
    if (it != recs.end()) {
      for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
        if (it->rank <= cfg.ks[i]) ++hits[i];
      }
    }
    ++report.n_evaluated;
  }
  if (report.n_evaluated == 0) throw NoEvaluableFilesError("no file has " + std::to_string(cfg.min_imports) + " known imports");
  finish(report, hits);
  return report;
}

EvalReport eval_alternative_soft(const std::vector<SourceUnit>& units, const TfIdfIndex& index,
                                 const Summarizer& summarizer, int k, int k_truth) {
  if (k < 1 || k_truth < 1) throw InvalidArgumentError("k and k_truth must be >= 1");
  EvalReport report;
  report.protocol = "soft";
  report.metric = "hit@k: top-k alternatives for docstring-stripped code overlap the top-" + std::to_string(k_truth) +
                  " retrieved for the docstrings";
  report.accuracy.emplace_back(k, 0.0);
  std::vector<std::size_t> hits(1, 0);

  for (const auto& unit : units) {
    std::string code;
    try {
      code = unit_code(unit);
    } catch (const NotebookFormatError&) {
      ++report.n_skipped;
      continue;
    }
    const auto docs = docstring_text(code);
    const auto truth = docs.empty() ? std::vector<Recommendation>{} : query_index(index, docs, k_truth);
    if (truth.empty()) {
      ++report.n_skipped;
      continue;
    }
    PackageSet truth_names;
    for (const auto& r : truth) truth_names.insert(r.package);
    const auto predicted = recommend_alternative(strip_docstrings(code), index, summarizer, k);
    if (intersects(predicted.recommendations, truth_names)) ++hits[0];
    ++report.n_evaluated;
  }
  if (report.n_evaluated == 0) throw NoEvaluableFilesError("no unit has docstrings that retrieve a library");
  finish(report, hits);
  return report;
}

HardLabelSet read_hard_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  HardLabelSet labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    HardLabel label;
    try {
      const auto j = nlohmann::json::parse(line);
      label.path = j.at("path").get<std::string>();
      for (const auto& p : j.at("expected")) label.expected.insert(p.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("label line " + std::to_string(lineno) + ": " + e.what());
    }
    if (label.expected.empty()) throw FormatError("label line " + std::to_string(lineno) + ": empty expected set");
    labels.push_back(std::move(label));
  }
  return labels;
}

EvalReport eval_alternative_hard(const HardLabelSet& labels, const std::filesystem::path& base_dir,
                                 const TfIdfIndex& index, const Summarizer& summarizer, int k) {
  if (k < 1) throw InvalidArgumentError("k must be >= 1");
  std::vector<SourceUnit> units;
  std::vector<std::string> missing;
  for (const auto& label : labels) {
    std::filesystem::path p(label.path);
    if (p.is_relative()) p = base_dir / p;
    try {
      units.push_back(read_source_unit(p, label.path));
    } catch (const IoError&) {
      missing.push_back(label.path);
    }
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw LabelResolutionError("unresolvable label paths: " + names);
  }

  EvalReport report;
  report.protocol = "hard";
  report.metric = "hit@k: top-k alternatives intersect the annotated libraries";
  report.accuracy.emplace_back(k, 0.0);
  std::vector<std::size_t> hits(1, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto predicted = recommend_alternative(units[i], index, summarizer, k);
    if (intersects(predicted.recommendations, labels[i].expected)) ++hits[0];
    ++report.n_evaluated;
  }
  if (report.n_evaluated == 0) throw NoEvaluableFilesError("label set is empty");
  finish(report, hits);
  return report;
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double held_out_fraction, std::uint64_t seed) {
  if (held_out_fraction < 0.0 || held_out_fraction > 1.0) throw InvalidArgumentError("fraction must be in [0, 1]");
  std::vector<std::size_t> order(corpus.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_held = static_cast<std::size_t>(held_out_fraction * static_cast<double>(order.size()) + 0.5);
  std::vector<bool> held(order.size(), false);
  for (std::size_t i = 0; i < n_held; ++i) held[order[i]] = true;

  Corpus train, test;
  train.source_root = test.source_root = corpus.source_root;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) (held[i] ? test : train).records.push_back(corpus.records[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace pkgrec
