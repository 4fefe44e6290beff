#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "pkgrec/error.hpp"
#include "pkgrec/service.hpp"
#include "pkgrec/synthetic.hpp"
#include "temp_dir.hpp"

using namespace pkgrec;
using nlohmann::json;

namespace {

std::shared_ptr<const ModelBundle> small_bundle() {
  static const auto bundle = [] {
    SyntheticConfig sc;
    sc.files = 600;
    const auto corpus = make_synthetic_corpus(sc);
    const auto vocab = build_vocabulary(corpus, 1);
    TrainConfig tc;
    tc.dim = 16;
    tc.epochs = 3;
    auto b = std::make_shared<ModelBundle>();
    b->embeddings = train(build_pair_stats(corpus, vocab), vocab, tc);
    LibraryCatalog cat;
    cat.add("c00_p01", "http client for web pages");
    cat.add("c01_p01", "plot chart figure");
    b->catalog = cat;
    b->index = build_index(cat);
    return std::shared_ptr<const ModelBundle>(b);
  }();
  return bundle;
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("verdict strings") {
    for (auto v : {Verdict::yes, Verdict::relevant_not_required, Verdict::not_relevant}) {
      CHECK(verdict_from_string(to_string(v)) == v);
    }
    CHECK(std::string(to_string(Verdict::relevant_not_required)) == "relevant_not_required");
    CHECK_FALSE(verdict_from_string("maybe"));
  }

  TEST_CASE("recommend contract") {
    RecommendationService svc({}, small_bundle());
    const auto ok = svc.recommend(R"({"code":"import c03_p02\n# http web pages"})");
    REQUIRE(ok.status == 200);
    const auto j = json::parse(ok.body);
    CHECK(j["imports_detected"] == json::array({"c03_p02"}));
    CHECK(j["complementary"].size() == 5);
    CHECK(j["complementary"][0]["rank"] == 1);
    CHECK(j["complementary"][0]["kind"] == "complementary");
    CHECK(j["alternative"][0]["package"] == "c00_p01");
    CHECK(j["request_id"].is_string());

    const auto k = json::parse(svc.recommend(R"({"code":"import c03_p02","top_k_complementary":2})").body);
    CHECK(k["complementary"].size() == 2);
    CHECK(k["request_id"] != j["request_id"]);

    const auto empty = json::parse(svc.recommend(R"({"code":""})").body);
    CHECK(empty["complementary"].empty());
    CHECK(empty["alternative"].empty());
    CHECK_FALSE(empty["warnings"].empty());

    const auto unknown = svc.recommend(R"({"code":"import nothing_known"})");
    CHECK(unknown.status == 200);
    CHECK(json::parse(unknown.body)["warnings"].dump().find("NoKnownImportsError") != std::string::npos);

    CHECK(svc.recommend("{not json").status == 400);
    CHECK(svc.recommend(R"({"source":"x"})").status == 400);
    CHECK(svc.recommend(R"({"code":"x","top_k_alternative":0})").status == 400);
  }

  TEST_CASE("health and missing model") {
    ServiceConfig cfg;
    cfg.model_version = "v7";
    RecommendationService svc(cfg);
    CHECK(svc.health().status == 503);
    CHECK(svc.recommend(R"({"code":"import os"})").status == 503);
    svc.swap_bundle(small_bundle());
    const auto h = svc.health();
    CHECK(h.status == 200);
    CHECK(json::parse(h.body) == json{{"status", "ok"}, {"model_version", "v7"}});
  }

  TEST_CASE("feedback log and report") {
    test::TempDir dir;
    ServiceConfig cfg;
    cfg.feedback_log = dir.path() / "feedback.jsonl";
    {
      RecommendationService svc(cfg, small_bundle());
      CHECK(svc.feedback(R"({"request_id":"r1","package":"a","verdict":"yes"})").status == 204);
      CHECK(svc.feedback(R"({"request_id":"r1","package":"b","verdict":"relevant_not_required"})").status == 204);
      CHECK(svc.feedback(R"({"request_id":"r2","package":"c","verdict":"not_relevant"})").status == 204);
      CHECK(svc.feedback(R"({"request_id":"r2","package":"d","verdict":"yes"})").status == 204);
      CHECK(svc.feedback(R"({"request_id":"r3","package":"a","verdict":"Yes"})").status == 400);
      CHECK(svc.feedback(R"({"package":"a","verdict":"yes"})").status == 400);
      CHECK(svc.feedback("nope").status == 400);
      CHECK(svc.feedback_events() == 4);
    }
    std::ifstream in(cfg.feedback_log);
    std::string first;
    std::getline(in, first);
    const auto event = json::parse(first);
    CHECK(event["verdict"] == "yes");
    CHECK(event["timestamp"].is_string());

    std::ifstream log(cfg.feedback_log);
    std::stringstream with_junk;
    with_junk << log.rdbuf() << "garbage\n";
    const auto s = summarize_feedback(with_junk);
    CHECK(s.total == 4);
    CHECK(s.malformed_lines == 1);
    CHECK(s.share(Verdict::yes) == 0.5);
    CHECK(s.share(Verdict::not_relevant) == 0.25);
  }

  TEST_CASE("http transport with concurrent clients") {
    test::TempDir dir;
    ServiceConfig cfg;
    cfg.feedback_log = dir.path() / "fb.jsonl";
    RecommendationService svc(cfg, small_bundle());
    HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    server.start();

    httplib::Client probe("127.0.0.1", port);
    const auto health = probe.Get("/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");
    const auto pre = probe.Options("/v1/recommend");
    REQUIRE(pre);
    CHECK(pre->status == 204);

    std::vector<std::string> lists(20);
    std::vector<int> statuses(40, 0);
    std::vector<std::thread> threads;
    for (int i = 0; i < 20; ++i) {
      threads.emplace_back([&, i] {
        httplib::Client c("127.0.0.1", port);
        if (auto r = c.Post("/v1/recommend", R"({"code":"import c02_p05\nimport c02_p06"})", "application/json")) {
          statuses[static_cast<std::size_t>(i)] = r->status;
          lists[static_cast<std::size_t>(i)] = json::parse(r->body)["complementary"].dump();
        } else {
          MESSAGE("recommend failed: " << httplib::to_string(r.error()));
        }
        const auto fb = json{{"request_id", "r"}, {"package", "p" + std::to_string(i)}, {"verdict", "yes"}}.dump();
        if (auto r = c.Post("/v1/feedback", fb, "application/json")) statuses[20 + static_cast<std::size_t>(i)] = r->status;
      });
    }
    for (auto& t : threads) t.join();
    server.stop();
    for (int i = 0; i < 20; ++i) {
      CHECK(statuses[static_cast<std::size_t>(i)] == 200);
      CHECK(statuses[20 + static_cast<std::size_t>(i)] == 204);
      CHECK(lists[static_cast<std::size_t>(i)] == lists[0]);
    }
    CHECK(count_lines(cfg.feedback_log) == 20);
  }
}
