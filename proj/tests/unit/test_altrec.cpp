#include <cmath>
#include <sstream>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "oracles.hpp"
#include "pkgrec/altrec.hpp"
#include "pkgrec/error.hpp"

using namespace pkgrec;

namespace {

LibraryCatalog catalog_of(std::initializer_list<std::pair<const char*, const char*>> entries) {
  LibraryCatalog c;
  for (const auto& [p, d] : entries) c.add(p, d);
  return c;
}

// Catalog over a small word pool so that repeated terms and ties are common.
std::map<std::string, std::string> random_catalog(Rng& rng, int n) {
  static const char* pool[] = {"parse", "json", "http", "client", "plot", "chart", "matrix", "tensor",
                               "image", "audio", "the", "of", "fast", "table", "csv", "xml"};
  std::map<std::string, std::string> out;
  for (int i = 0; i < n; ++i) {
    std::string desc;
    const int len = 1 + static_cast<int>(rng.below(6));
    for (int w = 0; w < len; ++w) desc += std::string(pool[rng.below(16)]) + " ";
    out["lib" + std::to_string(100 + i)] = desc;
  }
  return out;
}

double norm(const SparseVector& v) {
  double s = 0;
  for (const auto& e : v) s += e.weight * e.weight;
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("altrec") {
  TEST_CASE("tokenizer") {
    CHECK(tokenize_text("Read a CSV-file, quickly! x 42") == std::vector<std::string>{"read", "csv", "file", "quickly", "42"});
    CHECK(tokenize_text("").empty());
    TokenizerConfig keep;
    keep.use_stop_words = false;
    CHECK(tokenize_text("the parser", keep) == std::vector<std::string>{"the", "parser"});
    CHECK(is_stop_word("the"));
    CHECK_FALSE(is_stop_word("numpy"));
  }

  TEST_CASE("catalog validation and jsonl") {
    LibraryCatalog c;
    c.add("a", "alpha");
    CHECK_THROWS_AS(c.add("a", "again"), InvalidArgumentError);
    CHECK_THROWS_AS(c.add("b", "   "), InvalidArgumentError);
    std::stringstream ss;
    write_catalog_jsonl(c, ss);
    CHECK(read_catalog_jsonl(ss) == c);
    std::stringstream bad(R"({"package":"x"})");
    CHECK_THROWS_AS(read_catalog_jsonl(bad), FormatError);
  }

  TEST_CASE("single document weights") {
    const auto index = build_index(catalog_of({{"p", "alpha alpha beta"}}));
    REQUIRE(index.terms() == std::vector<std::string>{"alpha", "beta"});
    CHECK(index.idf()[0] == doctest::Approx(1.0).epsilon(1e-15));
    const double ta = 1 + std::log(2.0), tb = 1.0, n = std::sqrt(ta * ta + tb * tb);
    const auto& v = index.doc_vector(0);
    REQUIRE(v.size() == 2);
    CHECK(v[0].weight == doctest::Approx(ta / n).epsilon(1e-15));
    CHECK(v[1].weight == doctest::Approx(tb / n).epsilon(1e-15));
  }

  TEST_CASE("identical and disjoint documents") {
    const auto same = build_index(catalog_of({{"a", "fast json parser"}, {"b", "fast json parser"}}));
    CHECK(sparse_dot(same.doc_vector(0), same.doc_vector(1)) == doctest::Approx(1.0).epsilon(1e-12));
    const auto disjoint = build_index(catalog_of({{"a", "alpha"}, {"b", "beta"}, {"c", "gamma"}}));
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) CHECK(sparse_dot(disjoint.doc_vector(i), disjoint.doc_vector(j)) == 0.0);
    }
    CHECK_THROWS_AS(build_index(LibraryCatalog{}), EmptyIndexError);
    CHECK_THROWS_AS(build_index(catalog_of({{"a", "the of a"}})), EmptyIndexError);
  }

  TEST_CASE("query edge cases") {
    const auto index = build_index(catalog_of({{"a", "alpha"}, {"b", "alpha beta"}}));
    CHECK(query_index(index, "zzzz", 5).empty());
    CHECK(query_index(index, "alpha", 1).size() == 1);
    CHECK_THROWS_AS(query_index(index, "alpha", 0), InvalidArgumentError);
  }

  TEST_CASE("index vectors have unit norm and positive idf") {
    Rng rng(17);
    const auto cat = random_catalog(rng, 80);
    LibraryCatalog c;
    for (const auto& [p, d] : cat) {
      if (!oracle::words(d).empty()) c.add(p, d);
    }
    const auto index = build_index(c);
    for (double w : index.idf()) CHECK(w > 0);
    for (std::size_t d = 0; d < index.size(); ++d) CHECK(std::fabs(norm(index.doc_vector(d)) - 1.0) < 1e-9);
  }

  TEST_CASE("query matches dense oracle including ties") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
      Rng rng(trial + 1);
      const int n = 10 + static_cast<int>(rng.below(190));
      auto cat = random_catalog(rng, n);
      LibraryCatalog c;
      std::map<std::string, std::string> kept;
      for (const auto& [p, d] : cat) {
        if (oracle::words(d).empty()) continue;
        c.add(p, d);
        kept[p] = d;
      }
      const auto index = build_index(c);
      const oracle::DenseTfIdf dense(kept);
      for (int q = 0; q < 10; ++q) {
        const auto query = random_catalog(rng, 1).begin()->second + " unknownterm";
        const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        CAPTURE(query);
        CHECK(oracle::same_ranking(query_index(index, query, k), dense.query(query, k)));
      }
    }
  }

  TEST_CASE("self retrieval") {
    LibraryCatalog c;
    for (int i = 0; i < 30; ++i) {
      c.add("pkg" + std::to_string(i), "shared words plus unique" + std::to_string(i) + " token" + std::to_string(i * 7));
    }
    const auto index = build_index(c);
    for (const auto& [p, d] : c.entries()) {
      const auto top = query_index(index, d, 1);
      REQUIRE(top.size() == 1);
      CHECK(top[0].package == p);
      CHECK(std::fabs(top[0].score - 1.0) < 1e-9);
    }
  }

  TEST_CASE("heuristic summary examples") {
    const auto s = summarize_heuristic("def load_csv_file():\n  \"\"\"Read a csv into a table.\"\"\"");
    CHECK(s.text.find("read a csv into a table load csv file") != std::string::npos);
    CHECK(summarize_heuristic("").text.empty());
    CHECK(summarize_heuristic("").source_spans.empty());
    CHECK(summarize_heuristic("x=1").text == "x");

    const auto full = summarize_heuristic("#!/usr/bin/env python\n# Fetch pages\n\"\"\"Doc.\"\"\"\nimport httpClient\n\"\"\"not a docstring\"\"\"\n");
    CHECK(full.text == "doc fetch pages http client");
    REQUIRE(full.source_spans.size() == 3);
    CHECK(full.source_spans[0].kind == SpanKind::docstring);
    CHECK(full.source_spans[1].kind == SpanKind::comment);
    CHECK(full.source_spans[2].kind == SpanKind::identifiers);
  }

  TEST_CASE("docstrings") {
    const std::string src =
        "\"\"\"Module help.\"\"\"\nclass Parser:\n    '''Parses JSON.'''\n    def run(self):\n"
        "        \"\"\"Run it.\"\"\"\n        s = \"not a doc\"\n";
    CHECK(docstring_text(src) == "module help parses json run it");
    const auto stripped = strip_docstrings(src);
    CHECK(stripped.find("Module help") == std::string::npos);
    CHECK(stripped.find("Parses JSON") == std::string::npos);
    CHECK(stripped.find("not a doc") != std::string::npos);
    CHECK(docstring_text(stripped).empty());
    CHECK(docstring_text("x = 1").empty());
  }

  TEST_CASE("alternative recommendation flags or filters imports") {
    const auto index = build_index(catalog_of({{"requests", "http client for fetching web pages"},
                                               {"urllib3", "http connection pool client"},
                                               {"numpy", "numerical arrays"}}));
    const std::string code = "import requests\n# fetch web pages over http\n";
    const auto flagged = recommend_alternative(code, index, HeuristicSummarizer{}, 5);
    REQUIRE(flagged.recommendations.size() == 2);
    CHECK(flagged.recommendations[0].package == "requests");
    CHECK(flagged.recommendations[0].already_imported);
    CHECK_FALSE(flagged.recommendations[1].already_imported);

    const auto filtered = recommend_alternative(code, index, HeuristicSummarizer{}, 5, {true});
    REQUIRE(filtered.recommendations.size() == 1);
    CHECK(filtered.recommendations[0].package == "urllib3");
    CHECK(filtered.recommendations[0].rank == 1);
  }

  TEST_CASE("notebooks are summarised per cell") {
    const auto index = build_index(catalog_of({{"pandas", "dataframe table csv"}, {"matplotlib", "plot chart"}}));
    SourceUnit nb;
    nb.id = "nb.ipynb";
    nb.kind = SourceKind::notebook;
    nb.text = R"({"cells":[{"cell_type":"code","source":"# read csv table"},{"cell_type":"code","source":"# draw chart"}]})";
    const auto r = recommend_alternative(nb, index, HeuristicSummarizer{}, 5);
    REQUIRE(r.summary.source_spans.size() == 2);
    CHECK(r.summary.source_spans[0].unit_id == "cell-0");
    CHECK(r.summary.source_spans[1].unit_id == "cell-1");
    CHECK(r.recommendations.size() == 2);
  }

  TEST_CASE("remote summarizer") {
    httplib::Server fake;
    std::atomic<int> calls{0};
    fake.Post("/summarize", [&](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      const auto body = nlohmann::json::parse(req.body);
      const auto code = body.at("code").get<std::string>();
      if (code == "boom") {
        res.status = 500;
        return;
      }
      res.set_content(nlohmann::json{{"summary", "Plot a Chart"}}.dump(), "application/json");
    });
    const int port = fake.bind_to_any_port("127.0.0.1");
    std::thread t([&] { fake.listen_after_bind(); });
    fake.wait_until_ready();

    RemoteSummarizerConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
    const auto ok = summarize_remote("x = 1", cfg);
    CHECK(ok.text == "plot a chart");
    REQUIRE(ok.source_spans.size() == 1);
    CHECK(ok.source_spans[0].kind == SpanKind::external_summary);
    CHECK(ok.warnings.empty());

    const auto fallback = summarize_remote("boom", cfg);
    CHECK(fallback.text == "boom");
    CHECK(fallback.warnings.size() == 1);

    cfg.fallback_to_heuristic = false;
    CHECK_THROWS_AS(summarize_remote("boom", cfg), SummarizerUnavailableError);
    fake.stop();
    t.join();

    // nothing listening any more
    cfg.timeout = std::chrono::milliseconds(500);
    CHECK_THROWS_AS(summarize_remote("x", cfg), SummarizerUnavailableError);
    cfg.fallback_to_heuristic = true;
    CHECK(summarize_remote("x", cfg).warnings.size() == 1);
    CHECK(calls.load() == 3);
  }
}
