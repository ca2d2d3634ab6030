#include <chrono>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "reibun/service.hpp"

namespace reibun {

struct HttpService::Impl {
  const Engine& engine;
  httplib::Server server;

  explicit Impl(const Engine& e) : engine(e) {}
};

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

using Handler = std::function<Json(const Json&)>;

httplib::Server::Handler post_route(Handler handler) {
  return [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::exception& e) {
      send_json(res, 400, error_envelope("malformed_json", e.what()));
      return;
    }
    try {
      send_json(res, 200, handler(body));
    } catch (...) {
      auto [status, envelope] = describe_error(std::current_exception());
      send_json(res, status, envelope);
    }
  };
}

}  // namespace

HttpService::HttpService(const Engine& engine) : impl_(std::make_unique<Impl>(engine)) {
  auto& srv = impl_->server;
  const Engine& eng = impl_->engine;
  const auto& cfg = eng.config();
  const auto timeout = cfg.request_timeout;
  srv.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                       (timeout.count() % 1000) * 1000);
  srv.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                        (timeout.count() % 1000) * 1000);
  const unsigned threads = std::max(1u, cfg.server_threads);
  srv.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

  for (const std::string prefix : {"/v1", ""}) {
    srv.Post(prefix + "/suggest", post_route([&eng](const Json& j) { return eng.suggest(j); }));
    srv.Post(prefix + "/generate", post_route([&eng](const Json& j) { return eng.generate(j); }));
    srv.Post(prefix + "/judge", post_route([&eng](const Json& j) { return eng.judge(j); }));
    srv.Get(prefix + "/health", [&eng](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, eng.health());
    });
    srv.Get(prefix + "/stats", [&eng](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, eng.stats());
    });
  }

  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty()) {
      const char* code = res.status == 404 ? "not_found" : res.status == 405 ? "method_not_allowed" : "error";
      res.set_content(error_envelope(code, req.method + " " + req.path).dump(), "application/json");
    }
  });
  srv.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("method={} path={} status={} bytes_in={} bytes_out={} remote={}", req.method, req.path,
                 res.status, req.body.size(), res.body.size(), req.remote_addr);
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    const int bound = srv.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!srv.bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpService::run() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace reibun
