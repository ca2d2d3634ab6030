#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace reibun::testing {

/// Runs an httplib server on a free localhost port for the object's lifetime.
class FakeServer {
 public:
  FakeServer();
  virtual ~FakeServer();
  std::string url() const;
  int port() const { return port_; }

 protected:
  void start();
  void shutdown();
  httplib::Server& server() { return *server_; }

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

/// Annotator sidecar stand-in. /parse answers with a registered CoNLL-U
/// document for known texts and otherwise one NOUN token per code point.
class FakeAnnotator : public FakeServer {
 public:
  explicit FakeAnnotator(std::size_t dimension = 8);
  ~FakeAnnotator() override;

  void add_parse(const std::string& text, const std::string& conllu);

  std::atomic<bool> parse_as_json{false};
  std::atomic<bool> bad_classify_sum{false};
  std::atomic<int> embed_status{200};
  std::atomic<int> delay_ms{0};
  std::atomic<int> embed_calls{0};
  std::atomic<int> max_concurrent_embeds{0};

 private:
  std::size_t dimension_;
  std::mutex mu_;
  std::map<std::string, std::string> parses_;
  std::atomic<int> active_embeds_{0};
};

/// OpenAI-style /v1/chat/completions with queued replies. A reply whose
/// status is not 200 is returned as an error.
class FakeChatServer : public FakeServer {
 public:
  FakeChatServer();
  ~FakeChatServer() override;

  void push(std::string content, int status = 200);
  std::vector<std::string> bodies() const;
  std::vector<std::string> auth_headers() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::pair<int, std::string>> replies_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

}  // namespace reibun::testing
