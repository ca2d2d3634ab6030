#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "reibun/engine.hpp"

namespace reibun {

/// HTTP front end over an Engine. Routes live under /v1 with unversioned
/// aliases: POST suggest, generate, judge; GET health, stats.
class HttpService {
 public:
  explicit HttpService(const Engine& engine);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  /// Throws std::runtime_error on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Exit codes: 0 success, 1 domain error, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace reibun
