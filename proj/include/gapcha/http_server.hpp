#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "gapcha/service.hpp"

namespace gapcha {

struct HttpConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path static_dir;  // widget files; any answers/ subtree is never served
  int sweep_interval_ms = 1000;
};

/// JSON API over a ChallengeService:
///   POST /v1/challenge, GET /v1/assets/{id}/{asset}, POST /v1/submit,
///   POST /v1/trajectory, GET /v1/families, GET /v1/health
class HttpServer {
 public:
  HttpServer(ChallengeService& service, HttpConfig config);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves on a background thread. Returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// True for request paths that name an answers/ directory segment.
bool is_answers_path(const std::string& path);

}  // namespace gapcha
