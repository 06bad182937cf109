#include "gapcha/http_server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <thread>

#include "gapcha/registry.hpp"

namespace gapcha {

bool is_answers_path(const std::string& path) {
  std::string lower;
  for (char c : path) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  std::size_t start = 0;
  while (start <= lower.size()) {
    auto end = lower.find_first_of("/\\", start);
    if (end == std::string::npos) end = lower.size();
    if (lower.compare(start, end - start, "answers") == 0) return true;
    start = end + 1;
  }
  return false;
}

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownFamily:
    case ErrorCode::UnknownChallenge:
      return 404;
    case ErrorCode::RateLimited:
      return 429;
    case ErrorCode::Io:
    case ErrorCode::GenerationRetryExceeded:
    case ErrorCode::CanvasOverflow:
      return 500;
    default:
      return 400;
  }
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  Json body = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (const auto* limited = dynamic_cast<const RateLimitedError*>(&e)) {
    body["retry_after_ms"] = limited->retry_after_ms();
    res.set_header("Retry-After", std::to_string((limited->retry_after_ms() + 999) / 1000));
  }
  send_json(res, status_for(e.code()), body);
}

template <typename F>
httplib::Server::Handler guarded(F handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const Json::exception& e) {
      send_error(res, Error(ErrorCode::Malformed, e.what()));
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      send_json(res, 500, {{"error", "Internal"}, {"message", "internal error"}});
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  ChallengeService& service;
  HttpConfig config;
  httplib::Server server;
  std::thread listener;
  std::thread sweeper;
  std::mutex mutex;
  std::condition_variable cv;
  bool stopping = false;
  int bound_port = 0;

  Impl(ChallengeService& s, HttpConfig c) : service(s), config(std::move(c)) { routes(); }

  void routes() {
    server.set_pre_routing_handler([](const httplib::Request& req, httplib::Response& res) {
      if (is_answers_path(req.path)) {
        send_json(res, 404, {{"error", "NotFound"}, {"message", "not found"}});
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });

    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    server.Get("/v1/families", guarded([](const httplib::Request&, httplib::Response& res) {
                 Json list = Json::array();
                 for (const auto& f : registered_families()) list.push_back(f);
                 send_json(res, 200, list);
               }));

    server.Post("/v1/challenge", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = Json::parse(req.body);
                  const auto family = body.at("family_id").get<std::string>();
                  const auto bundle = service.issue_challenge(family, req.remote_addr);
                  spdlog::info("issued {} ({})", bundle.challenge_id, family);
                  send_json(res, 200, bundle);
                }));

    server.Get(R"(/v1/assets/([0-9a-f]+)/(\d+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto [bytes, media] = service.asset(req.matches[1].str(), std::stoi(req.matches[2].str()));
                 res.status = 200;
                 res.set_header("Cache-Control", "no-store");
                 res.set_content(std::string(bytes.begin(), bytes.end()), media);
               }));

    server.Post("/v1/submit", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto submission = Json::parse(req.body).get<AnswerSubmission>();
                  const auto result = service.submit(submission);
                  spdlog::info("submit {} -> {} (policy v{})", submission.challenge_id, to_string(result.reason),
                               service.config().policy.version);
                  send_json(res, 200, result);
                }));

    server.Post("/v1/trajectory", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = Json::parse(req.body);
                  const auto id = body.at("challenge_id").get<std::string>();
                  const auto ack = service.ingest_trajectory(id, body.at("trajectory").get<TrajectoryRecord>());
                  if (ack.overwrite) spdlog::warn("trajectory for {} delivered again; last write wins", id);
                  send_json(res, 200, {{"ack", true}, {"challenge_id", id}, {"overwrite", ack.overwrite}});
                }));

    if (!config.static_dir.empty()) {
      if (!server.set_mount_point("/", config.static_dir.string())) {
        throw Error(ErrorCode::Io, "static directory not found: " + config.static_dir.string());
      }
    }
  }

  int bind() {
    if (config.port == 0) {
      bound_port = server.bind_to_any_port(config.host);
    } else if (server.bind_to_port(config.host, config.port)) {
      bound_port = config.port;
    } else {
      bound_port = -1;
    }
    if (bound_port <= 0) throw Error(ErrorCode::Io, "cannot bind " + config.host + ":" + std::to_string(config.port));
    return bound_port;
  }

  void start_sweeper() {
    sweeper = std::thread([this] {
      std::unique_lock lock(mutex);
      while (!stopping) {
        cv.wait_for(lock, std::chrono::milliseconds(config.sweep_interval_ms));
        if (stopping) break;
        lock.unlock();
        try {
          service.expire_due();
        } catch (const std::exception& e) {
          spdlog::error("expiry sweep failed: {}", e.what());
        }
        lock.lock();
      }
    });
  }
};

HttpServer::HttpServer(ChallengeService& service, HttpConfig config)
    : impl_(std::make_unique<Impl>(service, std::move(config))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
  const int port = impl_->bind();
  impl_->start_sweeper();
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpServer::run() {
  impl_->bind();
  impl_->start_sweeper();
  spdlog::info("listening on {}:{}", impl_->config.host, impl_->bound_port);
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
  if (impl_->sweeper.joinable()) impl_->sweeper.join();
}

int HttpServer::port() const { return impl_->bound_port; }

}  // namespace gapcha
