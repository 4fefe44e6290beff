#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "pkgrec/model_store.hpp"
#include "pkgrec/summarize.hpp"

namespace pkgrec {

enum class Verdict { yes, relevant_not_required, not_relevant };

const char* to_string(Verdict verdict);
std::optional<Verdict> verdict_from_string(std::string_view text);

struct ServiceConfig {
  int default_top_k_complementary = 5;
  int default_top_k_alternative = 5;
  /// Append-only JSON-lines feedback log. Empty disables feedback capture.
  std::filesystem::path feedback_log;
  std::string cors_origin = "*";
  std::chrono::milliseconds latency_budget{2000};
  /// Remote summarizer; the heuristic summarizer is used when unset.
  std::optional<RemoteSummarizerConfig> summarizer;
  bool filter_imported = true;
  std::string model_version = "unversioned";
};

struct HttpReply {
  int status = 200;
  std::string body;
};

/// Request handling for the /v1 API, independent of the HTTP transport.
/// Reads go through an immutable bundle that can be swapped atomically.
class RecommendationService {
 public:
  explicit RecommendationService(ServiceConfig config, std::shared_ptr<const ModelBundle> bundle = nullptr);

  void swap_bundle(std::shared_ptr<const ModelBundle> bundle);
  std::shared_ptr<const ModelBundle> bundle() const;

  HttpReply recommend(std::string_view body);  // POST /v1/recommend
  HttpReply feedback(std::string_view body);   // POST /v1/feedback
  HttpReply health() const;                     // GET /v1/health

  const ServiceConfig& config() const noexcept { return config_; }
  std::size_t feedback_events() const noexcept { return feedback_events_.load(); }

 private:
  std::string next_request_id();

  ServiceConfig config_;
  mutable std::mutex bundle_mutex_;
  std::shared_ptr<const ModelBundle> bundle_;
  std::mutex log_mutex_;
  std::ofstream log_;
  std::atomic<std::uint64_t> request_counter_{0};
  std::atomic<std::size_t> feedback_events_{0};
  std::string id_prefix_;
};

/// httplib transport for a RecommendationService. The service must outlive it.
class HttpServer {
 public:
  explicit HttpServer(RecommendationService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); blocks.
  void listen();
  /// Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Verdict shares over a feedback log.
struct FeedbackSummary {
  std::size_t total = 0;
  std::map<Verdict, std::size_t> counts;
  std::size_t malformed_lines = 0;
  double share(Verdict v) const;
};

FeedbackSummary summarize_feedback(std::istream& log);

}  // namespace pkgrec
