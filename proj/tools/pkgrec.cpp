// pkgrec: ingest source trees, train package embeddings, build the library
// index, recommend, evaluate and serve.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pkgrec/altrec.hpp"
#include "pkgrec/complement.hpp"
#include "pkgrec/error.hpp"
#include "pkgrec/eval.hpp"
#include "pkgrec/model_store.hpp"
#include "pkgrec/service.hpp"
#include "pkgrec/synthetic.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace pkgrec;

namespace {

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

ModelBundle load_or_empty(const fs::path& dir) {
  if (fs::exists(dir / "manifest.json")) return load_bundle(dir);
  return {};
}

ojson to_json(const std::vector<Recommendation>& recs) {
  ojson arr = ojson::array();
  for (const auto& r : recs) {
    ojson j{{"package", r.package}, {"score", r.score}, {"kind", to_string(r.kind)}, {"rank", r.rank}};
    if (r.kind == RecommendationKind::alternative) j["already_imported"] = r.already_imported;
    arr.push_back(std::move(j));
  }
  return arr;
}

void print_table(const char* title, const std::vector<Recommendation>& recs) {
  std::printf("%s\n", title);
  if (recs.empty()) {
    std::printf("  (none)\n");
    return;
  }
  std::printf("  %4s  %-32s %8s\n", "rank", "package", "score");
  for (const auto& r : recs) {
    std::printf("  %4d  %-32s %8.4f%s\n", r.rank, r.package.c_str(), r.score,
                r.already_imported ? "  (already imported)" : "");
  }
}

// --- subcommands -----------------------------------------------------------

struct IngestArgs {
  std::string root, out;
  bool notebooks = false;
};

int run_ingest(const IngestArgs& a) {
  const auto corpus = load_corpus(a.root, a.notebooks);
  std::ostringstream text;
  write_corpus_jsonl(corpus, text);
  write_text(a.out, text.str());
  std::fprintf(stderr, "ingested %zu files with imports (%zu skipped)\n", corpus.records.size(), corpus.skipped_files);
  return 0;
}

struct SynthArgs {
  SyntheticConfig config;
  std::string out, held_out_path;
  double held_out = 0.0;
};

int run_synth(const SynthArgs& a) {
  const auto corpus = make_synthetic_corpus(a.config);
  std::ostringstream train_text, held_text;
  if (a.held_out > 0.0) {
    const auto [train, held] = split_corpus(corpus, a.held_out, mix_seed(a.config.seed, 99));
    write_corpus_jsonl(train, train_text);
    write_corpus_jsonl(held, held_text);
    if (a.held_out_path.empty()) throw InvalidArgumentError("--held-out needs --held-out-out");
    write_text(a.held_out_path, held_text.str());
  } else {
    write_corpus_jsonl(corpus, train_text);
  }
  write_text(a.out, train_text.str());
  return 0;
}

struct TrainArgs {
  std::string corpus, out, stop_list;
  TrainConfig config;
  int min_count = 1;
  std::string schedule = "linear_decay";
};

int run_train(TrainArgs a) {
  a.config.lr_schedule = lr_schedule_from_string(a.schedule);
  const auto corpus = read_corpus_jsonl(a.corpus);
  const auto stop = split(a.stop_list, ',');
  const auto vocab = build_vocabulary(corpus, a.min_count, PackageSet(stop.begin(), stop.end()));
  const auto stats = build_pair_stats(corpus, vocab);
  auto bundle = load_or_empty(a.out);
  bundle.embeddings = train(stats, vocab, a.config);
  save_bundle(bundle, a.out);
  const auto& losses = bundle.embeddings->log().epoch_losses;
  std::fprintf(stderr, "trained %zu packages, %zu pairs; loss %.4f -> %.4f\n", vocab.size(), stats.entries().size(),
               losses.front(), losses.back());
  return 0;
}

struct IndexArgs {
  std::string catalog, out;
};

int run_index(const IndexArgs& a) {
  auto bundle = load_or_empty(a.out);
  bundle.catalog = read_catalog_jsonl(a.catalog);
  bundle.index = build_index(*bundle.catalog);
  save_bundle(bundle, a.out);
  std::fprintf(stderr, "indexed %zu of %zu catalog entries, %zu terms\n", bundle.index->size(), bundle.catalog->size(),
               bundle.index->terms().size());
  return 0;
}

struct RecommendArgs {
  std::string model, file, kind = "both", summarizer;
  int k = 5;
  bool json = false;
  bool filter_imported = false;
};

int run_recommend(const RecommendArgs& a) {
  if (a.kind != "complementary" && a.kind != "alternative" && a.kind != "both") {
    throw InvalidArgumentError("--kind must be complementary, alternative or both");
  }
  const auto bundle = load_bundle(a.model);
  const auto unit = read_source_unit(a.file);
  const auto imports = unit_imports(unit);
  std::vector<Recommendation> complementary, alternative;
  std::vector<std::string> warnings;

  if (a.kind != "alternative") {
    if (!bundle.embeddings) throw InvalidArgumentError("model has no embeddings; run `pkgrec train` first");
    complementary = recommend_complementary(imports, *bundle.embeddings, a.k);
  }
  if (a.kind != "complementary") {
    if (!bundle.index) throw InvalidArgumentError("model has no library index; run `pkgrec index` first");
    AlternativeOptions options;
    options.filter_imported = a.filter_imported;
    AlternativeResult result;
    if (a.summarizer.empty()) {
      result = recommend_alternative(unit, *bundle.index, HeuristicSummarizer{}, a.k, options);
    } else {
      result = recommend_alternative(unit, *bundle.index, RemoteSummarizer({a.summarizer}), a.k, options);
    }
    alternative = std::move(result.recommendations);
    warnings = std::move(result.summary.warnings);
  }

  if (a.json) {
    ojson out;
    out["file"] = a.file;
    out["imports_detected"] = imports;
    out["complementary"] = to_json(complementary);
    out["alternative"] = to_json(alternative);
    out["warnings"] = warnings;
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  if (a.kind != "alternative") print_table("complementary", complementary);
  if (a.kind != "complementary") print_table("alternative", alternative);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return 0;
}

struct ProjectArgs {
  std::string model, neighbors, insert;
  bool json = false;
};

int run_project(const ProjectArgs& a) {
  auto bundle = load_bundle(a.model);
  if (!bundle.embeddings) throw InvalidArgumentError("model has no embeddings");
  ProjectionRequest req;
  for (const auto& item : split(a.neighbors, ',')) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw InvalidArgumentError("neighbour '" + item + "' is not pkg:count");
    std::int64_t w = 0;
    const auto count = item.substr(colon + 1);
    const auto res = std::from_chars(count.data(), count.data() + count.size(), w);
    if (res.ec != std::errc{} || res.ptr != count.data() + count.size()) {
      throw InvalidArgumentError("bad count in '" + item + "'");
    }
    req.neighbors.emplace_back(item.substr(0, colon), w);
  }
  const auto projection = project_out_of_sample(req, *bundle.embeddings);
  if (projection.dropped_neighbors > 0) {
    std::fprintf(stderr, "warning: %zu neighbour(s) not in the vocabulary were ignored\n", projection.dropped_neighbors);
  }
  if (a.json) {
    std::cout << ojson(projection.vector).dump() << '\n';
  } else {
    std::string line;
    for (double x : projection.vector) line += (line.empty() ? "" : " ") + shortest(x);
    std::cout << line << '\n';
  }
  if (!a.insert.empty()) {
    bundle.embeddings = with_inserted(*bundle.embeddings, a.insert, projection.vector);
    save_bundle(bundle, a.model);
    std::fprintf(stderr, "inserted '%s' into %s\n", a.insert.c_str(), a.model.c_str());
  }
  return 0;
}

struct EvaluateArgs {
  std::string model, corpus, protocol = "loo", ks = "5,10", sources, labels, base, out, summarizer;
  std::uint64_t seed = 0;
  int min_imports = 2;
  int k = 5;
  int k_truth = 5;
  bool notebooks = false;
  bool table = false;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto bundle = load_bundle(a.model);
  EvalReport report;
  std::unique_ptr<Summarizer> summarizer;
  if (a.summarizer.empty()) {
    summarizer = std::make_unique<HeuristicSummarizer>();
  } else {
    summarizer = std::make_unique<RemoteSummarizer>(RemoteSummarizerConfig{a.summarizer});
  }

  if (a.protocol == "loo") {
    if (!bundle.embeddings) throw InvalidArgumentError("model has no embeddings");
    if (a.corpus.empty()) throw InvalidArgumentError("--protocol loo needs --corpus");
    EvalConfig cfg;
    cfg.seed = a.seed;
    cfg.min_imports = a.min_imports;
    cfg.ks.clear();
    for (const auto& k : split(a.ks, ',')) cfg.ks.push_back(std::stoi(k));
    report = eval_complementary_leave_one_out(read_corpus_jsonl(a.corpus), *bundle.embeddings, cfg);
  } else if (a.protocol == "soft") {
    if (!bundle.index) throw InvalidArgumentError("model has no library index");
    if (a.sources.empty()) throw InvalidArgumentError("--protocol soft needs --sources DIR");
    std::vector<SourceUnit> units;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(a.sources)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".py" || (a.notebooks && ext == ".ipynb"))) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) units.push_back(read_source_unit(f, fs::relative(f, a.sources).generic_string()));
    report = eval_alternative_soft(units, *bundle.index, *summarizer, a.k, a.k_truth);
  } else if (a.protocol == "hard") {
    if (!bundle.index) throw InvalidArgumentError("model has no library index");
    if (a.labels.empty()) throw InvalidArgumentError("--protocol hard needs --labels");
    const fs::path base = a.base.empty() ? fs::path(a.labels).parent_path() : fs::path(a.base);
    report = eval_alternative_hard(read_hard_labels(a.labels), base, *bundle.index, *summarizer, a.k);
  } else {
    throw InvalidArgumentError("--protocol must be loo, soft or hard");
  }
  write_text(a.out, to_json(report) + "\n");
  if (a.table) std::fputs(to_table(report).c_str(), stderr);
  return 0;
}

struct ServeArgs {
  std::string model, addr = "127.0.0.1:8080", summarizer, feedback_log = "feedback.jsonl", cors_origin = "*";
  int latency_budget_ms = 2000;
  bool no_filter_imported = false;
};

int run_serve(const ServeArgs& a) {
  const auto colon = a.addr.rfind(':');
  if (colon == std::string::npos) throw InvalidArgumentError("--addr must be HOST:PORT");
  ServiceConfig cfg;
  cfg.feedback_log = a.feedback_log;
  cfg.cors_origin = a.cors_origin;
  cfg.latency_budget = std::chrono::milliseconds(a.latency_budget_ms);
  cfg.filter_imported = !a.no_filter_imported;
  cfg.model_version = fs::path(a.model).filename().string();
  if (!a.summarizer.empty()) cfg.summarizer = RemoteSummarizerConfig{a.summarizer};
  RecommendationService service(cfg, std::make_shared<const ModelBundle>(load_bundle(a.model)));
  HttpServer server(service);
  const int port = server.bind(a.addr.substr(0, colon), std::stoi(a.addr.substr(colon + 1)));
  std::fprintf(stderr, "serving on %s:%d\n", a.addr.substr(0, colon).c_str(), port);
  server.listen();
  return 0;
}

struct FeedbackReportArgs {
  std::string log;
  bool json = false;
};

int run_feedback_report(const FeedbackReportArgs& a) {
  std::ifstream in(a.log);
  if (!in) throw IoError("cannot open " + a.log);
  const auto summary = summarize_feedback(in);
  const Verdict order[] = {Verdict::yes, Verdict::relevant_not_required, Verdict::not_relevant};
  if (a.json) {
    ojson shares;
    for (auto v : order) shares[to_string(v)] = summary.share(v);
    std::cout << ojson{{"total", summary.total}, {"shares", shares}, {"malformed_lines", summary.malformed_lines}}.dump(2)
              << '\n';
    return 0;
  }
  std::printf("%-24s %6s %7s\n", "verdict", "count", "share");
  for (auto v : order) {
    const auto it = summary.counts.find(v);
    std::printf("%-24s %6zu %6.1f%%\n", to_string(v), it == summary.counts.end() ? 0 : it->second, 100.0 * summary.share(v));
  }
  std::printf("%-24s %6zu\n", "total", summary.total);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Package recommendation from import co-occurrence embeddings and library descriptions"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Extract imports from a source tree into corpus JSON lines");
  c_ingest->add_option("--root", ingest.root, "Source directory")->required();
  c_ingest->add_flag("--notebooks", ingest.notebooks, "Include .ipynb files");
  c_ingest->add_option("--out", ingest.out, "Output corpus.jsonl (default stdout)");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic clustered import corpus");
  c_synth->add_option("--out", synth.out, "Output corpus.jsonl")->required();
  c_synth->add_option("--clusters", synth.config.clusters);
  c_synth->add_option("--per-cluster", synth.config.packages_per_cluster);
  c_synth->add_option("--files", synth.config.files);
  c_synth->add_option("--noise", synth.config.noise);
  c_synth->add_option("--locality", synth.config.locality);
  c_synth->add_option("--seed", synth.config.seed);
  c_synth->add_option("--held-out", synth.held_out, "Fraction of files written to --held-out-out");
  c_synth->add_option("--held-out-out", synth.held_out_path);

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train package embeddings on a corpus");
  c_train->add_option("--corpus", tr.corpus)->required();
  c_train->add_option("--out", tr.out, "Model directory")->required();
  c_train->add_option("--dim", tr.config.dim);
  c_train->add_option("--epochs", tr.config.epochs);
  c_train->add_option("--negatives", tr.config.negatives);
  c_train->add_option("--seed", tr.config.seed);
  c_train->add_option("--lr", tr.config.learning_rate);
  c_train->add_option("--lr-schedule", tr.schedule)->check(CLI::IsMember({"constant", "linear_decay"}));
  c_train->add_option("--min-count", tr.min_count);
  c_train->add_option("--stop-list", tr.stop_list, "Comma-separated packages to exclude");
  c_train->add_option("--exponent", tr.config.sampler.exponent, "Negative sampling exponent");
  c_train->add_option("--reject-threshold", tr.config.sampler.reject_threshold);

  IndexArgs ix;
  auto* c_index = app.add_subcommand("index", "Add a TF-IDF library index to a model directory");
  c_index->add_option("--catalog", ix.catalog)->required();
  c_index->add_option("--out", ix.out)->required();

  RecommendArgs rec;
  auto* c_rec = app.add_subcommand("recommend", "Recommend packages for a source file or notebook");
  c_rec->add_option("--model", rec.model)->required();
  c_rec->add_option("--file", rec.file)->required();
  c_rec->add_option("--k", rec.k);
  c_rec->add_option("--kind", rec.kind)->check(CLI::IsMember({"complementary", "alternative", "both"}));
  c_rec->add_option("--summarizer", rec.summarizer, "Remote summarizer base URL");
  c_rec->add_flag("--filter-imported", rec.filter_imported);
  c_rec->add_flag("--json", rec.json);

  ProjectArgs proj;
  auto* c_proj = app.add_subcommand("project", "Embed an unseen package from its co-occurring neighbours");
  c_proj->add_option("--model", proj.model)->required();
  c_proj->add_option("--neighbors", proj.neighbors, "pkg:count,pkg:count")->required();
  c_proj->add_option("--insert", proj.insert, "Add the projected package to the model under this name");
  c_proj->add_flag("--json", proj.json);

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Run an evaluation protocol and print a JSON report");
  c_eval->add_option("--model", ev.model)->required();
  c_eval->add_option("--protocol", ev.protocol)->check(CLI::IsMember({"loo", "soft", "hard"}));
  c_eval->add_option("--corpus", ev.corpus);
  c_eval->add_option("--seed", ev.seed);
  c_eval->add_option("--ks", ev.ks, "Comma-separated k values (loo)");
  c_eval->add_option("--min-imports", ev.min_imports);
  c_eval->add_option("--sources", ev.sources, "Source directory (soft)");
  c_eval->add_flag("--notebooks", ev.notebooks);
  c_eval->add_option("--labels", ev.labels, "Hard-label JSON lines (hard)");
  c_eval->add_option("--base", ev.base, "Directory label paths are relative to");
  c_eval->add_option("--k", ev.k);
  c_eval->add_option("--k-truth", ev.k_truth);
  c_eval->add_option("--summarizer", ev.summarizer);
  c_eval->add_option("--out", ev.out, "Write the JSON report here instead of stdout");
  c_eval->add_flag("--table", ev.table, "Also print a plain-text table to stderr");

  ServeArgs sv;
  auto* c_serve = app.add_subcommand("serve", "Serve the /v1 HTTP API");
  c_serve->add_option("--model", sv.model)->required();
  c_serve->add_option("--addr", sv.addr);
  c_serve->add_option("--summarizer", sv.summarizer);
  c_serve->add_option("--feedback-log", sv.feedback_log);
  c_serve->add_option("--cors-origin", sv.cors_origin);
  c_serve->add_option("--latency-budget-ms", sv.latency_budget_ms);
  c_serve->add_flag("--no-filter-imported", sv.no_filter_imported);

  FeedbackReportArgs fb;
  auto* c_fb = app.add_subcommand("feedback-report", "Summarise verdict shares in a feedback log");
  c_fb->add_option("--log", fb.log)->required();
  c_fb->add_flag("--json", fb.json);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_ingest->parsed()) return run_ingest(ingest);
    if (c_synth->parsed()) return run_synth(synth);
    if (c_train->parsed()) return run_train(tr);
    if (c_index->parsed()) return run_index(ix);
    if (c_rec->parsed()) return run_recommend(rec);
    if (c_proj->parsed()) return run_project(proj);
    if (c_eval->parsed()) return run_evaluate(ev);
    if (c_serve->parsed()) return run_serve(sv);
    if (c_fb->parsed()) return run_feedback_report(fb);
  } catch (const pkgrec::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
