#include "pkgrec/service.hpp"

#include <cstdio>
#include <ctime>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "pkgrec/altrec.hpp"
#include "pkgrec/complement.hpp"
#include "pkgrec/error.hpp"

namespace pkgrec {

using ojson = nlohmann::ordered_json;

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::yes: return "yes";
    case Verdict::relevant_not_required: return "relevant_not_required";
    case Verdict::not_relevant: return "not_relevant";
  }
  return "unknown";
}

std::optional<Verdict> verdict_from_string(std::string_view text) {
  if (text == "yes") return Verdict::yes;
  if (text == "relevant_not_required") return Verdict::relevant_not_required;
  if (text == "not_relevant") return Verdict::not_relevant;
  return std::nullopt;
}

namespace {

HttpReply error_reply(int status, const std::string& message) {
  return {status, ojson{{"error", message}}.dump()};
}

ojson to_json(const Recommendation& r) {
  ojson j{{"package", r.package}, {"score", r.score}, {"kind", to_string(r.kind)}, {"rank", r.rank}};
  if (r.kind == RecommendationKind::alternative) j["already_imported"] = r.already_imported;
  return j;
}

ojson to_json(const std::vector<Recommendation>& recs) {
  ojson arr = ojson::array();
  for (const auto& r : recs) arr.push_back(to_json(r));
  return arr;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::optional<int> positive_int(const nlohmann::json& body, const char* key, int fallback, std::string& error) {
  if (!body.contains(key)) return fallback;
  const auto& v = body[key];
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1 || v.get<std::int64_t>() > 1000) {
    error = std::string(key) + " must be an integer in [1, 1000]";
    return std::nullopt;
  }
  return v.get<int>();
}

}  // namespace

RecommendationService::RecommendationService(ServiceConfig config, std::shared_ptr<const ModelBundle> bundle)
    : config_(std::move(config)), bundle_(std::move(bundle)) {
  if (!config_.feedback_log.empty()) {
    log_.open(config_.feedback_log, std::ios::app);
    if (!log_) throw IoError("cannot open feedback log " + config_.feedback_log.string());
  }
  std::random_device rd;
  char buf[24];
  std::snprintf(buf, sizeof buf, "%08x", rd());
  id_prefix_ = std::string("req-") + buf + "-";
}

void RecommendationService::swap_bundle(std::shared_ptr<const ModelBundle> bundle) {
  std::lock_guard lock(bundle_mutex_);
  bundle_ = std::move(bundle);
}

std::shared_ptr<const ModelBundle> RecommendationService::bundle() const {
  std::lock_guard lock(bundle_mutex_);
  return bundle_;
}

std::string RecommendationService::next_request_id() {
  return id_prefix_ + std::to_string(request_counter_.fetch_add(1) + 1);
}

HttpReply RecommendationService::recommend(std::string_view body) {
  const auto started = std::chrono::steady_clock::now();
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    return error_reply(400, "request body is not valid JSON");
  }
  if (!req.is_object() || !req.contains("code") || !req["code"].is_string()) {
    return error_reply(400, "request must be an object with a string 'code'");
  }
  std::string error;
  const auto k_comp = positive_int(req, "top_k_complementary", config_.default_top_k_complementary, error);
  const auto k_alt = positive_int(req, "top_k_alternative", config_.default_top_k_alternative, error);
  if (!k_comp || !k_alt) return error_reply(400, error);

  const auto bundle = this->bundle();
  if (!bundle) return error_reply(503, "model not loaded");

  const auto code = req["code"].get<std::string>();
  const auto imports = extract_imports(code);
  std::vector<std::string> warnings;
  std::vector<Recommendation> complementary;
  std::vector<Recommendation> alternative;

  if (imports.empty()) warnings.emplace_back("no imports detected");
  if (!bundle->embeddings) {
    warnings.emplace_back("no embedding model loaded; complementary recommendations unavailable");
  } else if (!imports.empty()) {
    try {
      complementary = recommend_complementary(imports, *bundle->embeddings, *k_comp);
    } catch (const NoKnownImportsError& e) {
      warnings.emplace_back(e.what());
    }
  }

  if (!bundle->index) {
    warnings.emplace_back("no library index loaded; alternative recommendations unavailable");
  } else {
    AlternativeOptions options;
    options.filter_imported = config_.filter_imported;
    try {
      AlternativeResult result;
      if (config_.summarizer) {
        auto remote = *config_.summarizer;
        remote.timeout = std::min(remote.timeout, config_.latency_budget);
        result = recommend_alternative(code, *bundle->index, RemoteSummarizer(remote), *k_alt, options);
      } else {
        result = recommend_alternative(code, *bundle->index, HeuristicSummarizer{}, *k_alt, options);
      }
      alternative = std::move(result.recommendations);
      warnings.insert(warnings.end(), result.summary.warnings.begin(), result.summary.warnings.end());
    } catch (const SummarizerUnavailableError& e) {
      warnings.emplace_back(e.what());
    }
  }

  const auto elapsed = std::chrono::steady_clock::now() - started;
  if (elapsed > config_.latency_budget) {
    warnings.push_back("latency budget of " + std::to_string(config_.latency_budget.count()) + " ms exceeded");
  }

  ojson resp;
  resp["request_id"] = next_request_id();
  resp["imports_detected"] = imports;
  resp["complementary"] = to_json(complementary);
  resp["alternative"] = to_json(alternative);
  resp["warnings"] = warnings;
  return {200, resp.dump()};
}

HttpReply RecommendationService::feedback(std::string_view body) {
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    return error_reply(400, "request body is not valid JSON");
  }
  if (!req.is_object()) return error_reply(400, "request must be a JSON object");
  for (const char* key : {"request_id", "package", "verdict"}) {
    if (!req.contains(key) || !req[key].is_string()) return error_reply(400, std::string("missing string '") + key + "'");
  }
  const auto verdict = verdict_from_string(req["verdict"].get<std::string>());
  if (!verdict) return error_reply(400, "verdict must be one of yes, relevant_not_required, not_relevant");
  if (!log_.is_open()) return error_reply(503, "feedback log not configured");

  ojson event;
  event["request_id"] = req["request_id"];
  event["package"] = req["package"];
  event["verdict"] = to_string(*verdict);
  event["timestamp"] = utc_timestamp();
  const auto line = event.dump() + "\n";
  {
    std::lock_guard lock(log_mutex_);
    log_.write(line.data(), static_cast<std::streamsize>(line.size()));
    log_.flush();
    if (!log_) return error_reply(500, "feedback log write failed");
  }
  ++feedback_events_;
  return {204, ""};
}

HttpReply RecommendationService::health() const {
  const auto bundle = this->bundle();
  if (!bundle) return {503, ojson{{"status", "loading"}, {"model_version", config_.model_version}}.dump()};
  return {200, ojson{{"status", "ok"}, {"model_version", config_.model_version}}.dump()};
}

struct HttpServer::Impl {
  RecommendationService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(RecommendationService& s) : service(s) {
    const auto origin = service.config().cors_origin;
    server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    auto reply = [](httplib::Response& res, const HttpReply& r) {
      res.status = r.status;
      if (r.status != 204) res.set_content(r.body, "application/json");
    };
    server.Post("/v1/recommend", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.recommend(req.body));
    });
    server.Post("/v1/feedback", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.feedback(req.body));
    });
    server.Get("/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, service.health());
    });
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }
};

HttpServer::HttpServer(RecommendationService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

double FeedbackSummary::share(Verdict v) const {
  if (total == 0) return 0.0;
  const auto it = counts.find(v);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

FeedbackSummary summarize_feedback(std::istream& log) {
  FeedbackSummary summary;
  std::string line;
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto v = verdict_from_string(j.at("verdict").get<std::string>());
      if (!v) {
        ++summary.malformed_lines;
        continue;
      }
      ++summary.counts[*v];
      ++summary.total;
    } catch (const nlohmann::json::exception&) {
      ++summary.malformed_lines;
    }
  }
  return summary;
}

}  // namespace pkgrec
