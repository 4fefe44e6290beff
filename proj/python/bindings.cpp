#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pkgrec/altrec.hpp"
#include "pkgrec/complement.hpp"
#include "pkgrec/error.hpp"
#include "pkgrec/eval.hpp"
#include "pkgrec/model_store.hpp"
#include "pkgrec/synthetic.hpp"

namespace py = pybind11;
using namespace pkgrec;

namespace {

py::array_t<float> as_matrix(std::span<const float> data, std::size_t rows, int dim) {
  py::array_t<float> out({rows, static_cast<std::size_t>(dim)});
  std::copy(data.begin(), data.end(), out.mutable_data());
  return out;
}

void bind_errors(py::module_& m) {
  static py::exception<Error> base(m, "PkgrecError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // Subclass by kind so Python callers can catch e.g. NoKnownImportsError.
      auto module = py::module_::import("pkgrec._pkgrec");
      if (py::hasattr(module, e.kind().c_str())) {
        PyErr_SetString(module.attr(e.kind().c_str()).ptr(), e.what());
      } else {
        base(e.what());
      }
    }
  });
  for (const char* name : {"IoError", "FormatError", "NotebookFormatError", "InvalidArgumentError",
                           "EmptyVocabularyError", "DegenerateSamplerError", "DimensionError", "ZeroVectorError",
                           "NoKnownNeighborsError", "NoKnownImportsError", "EmptyIndexError",
                           "SummarizerUnavailableError", "NoEvaluableFilesError", "LabelResolutionError",
                           "TrainingDivergedError"}) {
    m.attr(name) = py::handle(PyErr_NewException((std::string("pkgrec.") + name).c_str(), base.ptr(), nullptr));
  }
}

void bind_corpus(py::module_& m) {
  py::class_<ImportRecord>(m, "ImportRecord")
      .def(py::init<>())
      .def(py::init([](std::string id, PackageSet pkgs) { return ImportRecord{std::move(id), std::move(pkgs)}; }),
           py::arg("unit_id"), py::arg("packages"))
      .def_readwrite("unit_id", &ImportRecord::unit_id)
      .def_readwrite("packages", &ImportRecord::packages);

  py::class_<Corpus>(m, "Corpus")
      .def(py::init<>())
      .def(py::init([](std::vector<ImportRecord> records) { return Corpus{std::move(records), {}, 0}; }),
           py::arg("records"))
      .def_readwrite("records", &Corpus::records)
      .def_readwrite("source_root", &Corpus::source_root)
      .def_readonly("skipped_files", &Corpus::skipped_files)
      .def("__len__", [](const Corpus& c) { return c.records.size(); });

  m.def("extract_imports", &extract_imports, py::arg("source_text"));
  m.def("extract_notebook_sources", &extract_notebook_sources, py::arg("json_text"));
  m.def("load_corpus", &load_corpus, py::arg("root"), py::arg("include_notebooks") = false);
  m.def("read_corpus_jsonl", py::overload_cast<const std::filesystem::path&>(&read_corpus_jsonl), py::arg("path"));
  m.def("split_corpus", &split_corpus, py::arg("corpus"), py::arg("held_out_fraction"), py::arg("seed"));

  py::class_<SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("clusters", &SyntheticConfig::clusters)
      .def_readwrite("packages_per_cluster", &SyntheticConfig::packages_per_cluster)
      .def_readwrite("files", &SyntheticConfig::files)
      .def_readwrite("min_imports", &SyntheticConfig::min_imports)
      .def_readwrite("max_imports", &SyntheticConfig::max_imports)
      .def_readwrite("noise", &SyntheticConfig::noise)
      .def_readwrite("locality", &SyntheticConfig::locality)
      .def_readwrite("seed", &SyntheticConfig::seed);
  m.def("make_synthetic_corpus", &make_synthetic_corpus, py::arg("config") = SyntheticConfig{});
}

void bind_embeddings(py::module_& m) {
  py::class_<Vocabulary>(m, "Vocabulary")
      .def("__len__", &Vocabulary::size)
      .def("__contains__", [](const Vocabulary& v, const std::string& n) { return v.contains(n); })
      .def("find", &Vocabulary::find)
      .def_property_readonly("packages", &Vocabulary::packages)
      .def_property_readonly("frequencies", &Vocabulary::frequencies)
      .def_property_readonly("min_count", &Vocabulary::min_count);
  m.def("build_vocabulary", &build_vocabulary, py::arg("corpus"), py::arg("min_count") = 1,
        py::arg("stop_list") = PackageSet{});

  py::class_<PairStats>(m, "PairStats")
      .def("count", &PairStats::count)
      .def_property_readonly("total_pairs", &PairStats::total_pairs)
      .def("entries", [](const PairStats& s) {
        std::vector<std::tuple<int, int, std::int64_t>> out;
        for (const auto& e : s.entries()) out.emplace_back(e.first, e.second, e.count);
        return out;
      });
  m.def("build_pair_stats", &build_pair_stats, py::arg("corpus"), py::arg("vocab"));

  py::class_<SamplerOptions>(m, "SamplerOptions")
      .def(py::init<>())
      .def_readwrite("exponent", &SamplerOptions::exponent)
      .def_readwrite("reject_threshold", &SamplerOptions::reject_threshold)
      .def_readwrite("max_retries", &SamplerOptions::max_retries)
      .def_readwrite("allow_fallback", &SamplerOptions::allow_fallback);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_property(
          "lr_schedule", [](const TrainConfig& c) { return std::string(to_string(c.lr_schedule)); },
          [](TrainConfig& c, const std::string& s) { c.lr_schedule = lr_schedule_from_string(s); })
      .def_readwrite("negatives", &TrainConfig::negatives)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("sampler", &TrainConfig::sampler);

  py::class_<EmbeddingModel>(m, "EmbeddingModel")
      .def_property_readonly("vocab", &EmbeddingModel::vocab)
      .def_property_readonly("dim", &EmbeddingModel::dim)
      .def_property_readonly("epoch_losses", [](const EmbeddingModel& e) { return e.log().epoch_losses; })
      .def("target", [](const EmbeddingModel& e, int id) {
        const auto row = e.target(id);
        return std::vector<float>(row.begin(), row.end());
      })
      .def("target_matrix", [](const EmbeddingModel& e) { return as_matrix(e.target_matrix(), e.rows(), e.dim()); })
      .def("context_matrix", [](const EmbeddingModel& e) { return as_matrix(e.context_matrix(), e.rows(), e.dim()); });

  m.def("train", &train, py::arg("stats"), py::arg("vocab"), py::arg("config") = TrainConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("random_model", &random_model, py::arg("vocab"), py::arg("dim"), py::arg("seed"));

  m.def(
      "sgns_loss",
      [](const std::vector<double>& u, const std::vector<double>& v, const std::vector<std::vector<double>>& negs) {
        return sgns_loss(u, v, negs);
      },
      py::arg("u"), py::arg("v"), py::arg("negs"));
  m.def(
      "sgns_gradient",
      [](const std::vector<double>& u, const std::vector<double>& v, const std::vector<std::vector<double>>& negs) {
        auto g = sgns_gradient(u, v, negs);
        return py::make_tuple(g.u, g.v, g.negs);
      },
      py::arg("u"), py::arg("v"), py::arg("negs"));
  m.def(
      "cosine", [](const std::vector<double>& a, const std::vector<double>& b) { return cosine(a, b); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "project_out_of_sample",
      [](const std::vector<std::pair<std::string, std::int64_t>>& neighbors, const EmbeddingModel& model) {
        return project_out_of_sample(ProjectionRequest{neighbors}, model).vector;
      },
      py::arg("neighbors"), py::arg("model"));
  m.def(
      "with_inserted",
      [](const EmbeddingModel& model, const std::string& name, const std::vector<double>& vec) {
        return with_inserted(model, name, vec);
      },
      py::arg("model"), py::arg("name"), py::arg("vector"));
}

void bind_recommend(py::module_& m) {
  py::class_<Recommendation>(m, "Recommendation")
      .def_readonly("package", &Recommendation::package)
      .def_readonly("score", &Recommendation::score)
      .def_readonly("rank", &Recommendation::rank)
      .def_readonly("already_imported", &Recommendation::already_imported)
      .def_property_readonly("kind", [](const Recommendation& r) { return std::string(to_string(r.kind)); })
      .def("__repr__", [](const Recommendation& r) {
        return "<Recommendation #" + std::to_string(r.rank) + " " + r.package + " " + std::to_string(r.score) + ">";
      });

  m.def(
      "recommend_complementary",
      [](const PackageSet& imports, const EmbeddingModel& model, int k, std::int64_t min_frequency) {
        return recommend_complementary(imports, model, k, ComplementOptions{min_frequency});
      },
      py::arg("imports"), py::arg("model"), py::arg("k") = 5, py::arg("min_frequency") = 0);

  py::class_<LibraryCatalog>(m, "LibraryCatalog")
      .def(py::init<>())
      .def("add", &LibraryCatalog::add, py::arg("package"), py::arg("description"))
      .def_property_readonly("entries", &LibraryCatalog::entries)
      .def("__len__", &LibraryCatalog::size);
  m.def("read_catalog_jsonl", py::overload_cast<const std::filesystem::path&>(&read_catalog_jsonl), py::arg("path"));

  py::class_<TfIdfIndex>(m, "TfIdfIndex")
      .def_property_readonly("terms", &TfIdfIndex::terms)
      .def_property_readonly("idf", &TfIdfIndex::idf)
      .def_property_readonly("packages", &TfIdfIndex::packages)
      .def("__len__", &TfIdfIndex::size);
  m.def("build_index", [](const LibraryCatalog& c) { return build_index(c); }, py::arg("catalog"));
  m.def("query_index", &query_index, py::arg("index"), py::arg("text"), py::arg("k") = 5);

  py::class_<CodeSummary>(m, "CodeSummary")
      .def_readonly("text", &CodeSummary::text)
      .def_readonly("warnings", &CodeSummary::warnings)
      .def_property_readonly("source_spans", [](const CodeSummary& s) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& span : s.source_spans) out.emplace_back(span.unit_id, to_string(span.kind));
        return out;
      });
  m.def("summarize_heuristic", &summarize_heuristic, py::arg("source_text"), py::arg("unit_id") = "file");
  m.def("docstring_text", &docstring_text, py::arg("source_text"));
  m.def("strip_docstrings", &strip_docstrings, py::arg("source_text"));
  m.def(
      "recommend_alternative",
      [](const std::string& source, const TfIdfIndex& index, int k, bool filter_imported,
         std::optional<std::string> summarizer_endpoint) {
        AlternativeOptions options{filter_imported};
        if (summarizer_endpoint) {
          return recommend_alternative(source, index, RemoteSummarizer({*summarizer_endpoint}), k, options)
              .recommendations;
        }
        return recommend_alternative(source, index, HeuristicSummarizer{}, k, options).recommendations;
      },
      py::arg("source_text"), py::arg("index"), py::arg("k") = 5, py::arg("filter_imported") = false,
      py::arg("summarizer_endpoint") = py::none());
}

void bind_eval_and_store(py::module_& m) {
  py::class_<EvalConfig>(m, "EvalConfig")
      .def(py::init<>())
      .def_readwrite("ks", &EvalConfig::ks)
      .def_readwrite("seed", &EvalConfig::seed)
      .def_readwrite("min_imports", &EvalConfig::min_imports);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("protocol", &EvalReport::protocol)
      .def_readonly("seed", &EvalReport::seed)
      .def_readonly("n_evaluated", &EvalReport::n_evaluated)
      .def_readonly("n_skipped", &EvalReport::n_skipped)
      .def_property_readonly("accuracy",
                             [](const EvalReport& r) { return std::map<int, double>(r.accuracy.begin(), r.accuracy.end()); })
      .def("to_json", [](const EvalReport& r) { return to_json(r); });

  m.def("eval_complementary_leave_one_out", &eval_complementary_leave_one_out, py::arg("corpus"), py::arg("model"),
        py::arg("config") = EvalConfig{}, py::call_guard<py::gil_scoped_release>());

  py::class_<ModelBundle>(m, "ModelBundle")
      .def(py::init<>())
      .def_readwrite("embeddings", &ModelBundle::embeddings)
      .def_readwrite("catalog", &ModelBundle::catalog)
      .def_readwrite("index", &ModelBundle::index)
      .def_readonly("format_version", &ModelBundle::format_version);
  m.def("save_bundle", &save_bundle, py::arg("bundle"), py::arg("dir"));
  m.def("load_bundle", &load_bundle, py::arg("dir"));
}

}  // namespace

PYBIND11_MODULE(_pkgrec, m) {
  m.doc() = "Package recommendation engine (C++ core)";
  m.attr("__version__") = "0.1.0";
  bind_errors(m);
  bind_corpus(m);
  bind_embeddings(m);
  bind_recommend(m);
  bind_eval_and_store(m);
}
