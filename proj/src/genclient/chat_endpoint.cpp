#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "reibun/detail/http.hpp"
#include "reibun/genclient.hpp"

namespace reibun {

using nlohmann::json;

HttpChatEndpoint::HttpChatEndpoint(HttpChatConfig cfg) : cfg_(std::move(cfg)) {
  detail::split_url(cfg_.base_url);
}

std::string HttpChatEndpoint::complete(const ChatRequest& request) {
  const auto url = detail::split_url(cfg_.base_url);
  json body{{"model", cfg_.model}, {"temperature", request.temperature}};
  body["messages"] = json::array();
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (request.repetition_penalty) body["repetition_penalty"] = *request.repetition_penalty;

  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  const std::string path = url.path_prefix + "/chat/completions";
  const std::string payload = body.dump();

  std::string last_error;
  for (unsigned attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
    auto client = detail::make_client(url, cfg_.timeout);
    auto res = client->Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ChatError("chat endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      const json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw ChatError(std::string("malformed chat completion: ") + e.what());
    }
  }
  throw ChatError("chat endpoint " + cfg_.base_url + " failed after " +
                  std::to_string(cfg_.max_retries + 1) + " attempts: " + last_error);
}

ScriptedChatEndpoint::ScriptedChatEndpoint(std::vector<Turn> turns) : turns_(std::move(turns)) {}

std::vector<ScriptedChatEndpoint::Turn> ScriptedChatEndpoint::parse_transcript(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ChatError(std::string("bad transcript: ") + e.what());
  }
  const json& list = doc.is_object() ? doc.value("responses", json::array()) : doc;
  if (!list.is_array()) throw ChatError("bad transcript: expected an array of responses");
  std::vector<Turn> turns;
  for (const auto& entry : list) {
    if (entry.is_string()) {
      turns.push_back({entry.get<std::string>(), std::nullopt});
    } else if (entry.is_object() && entry.contains("response")) {
      Turn t{entry.at("response").get<std::string>(), std::nullopt};
      if (entry.contains("expect")) t.expect = entry.at("expect").get<std::string>();
      turns.push_back(std::move(t));
    } else {
      throw ChatError("bad transcript entry: " + entry.dump());
    }
  }
  return turns;
}

std::vector<ScriptedChatEndpoint::Turn> ScriptedChatEndpoint::load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ChatError("cannot open transcript " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_transcript(ss.str());
}

std::string ScriptedChatEndpoint::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  seen_.push_back(request);
  if (next_ >= turns_.size()) throw ChatError("scripted endpoint exhausted");
  const Turn& turn = turns_[next_++];
  if (turn.expect) {
    std::string last_user;
    for (const auto& m : request.messages) {
      if (m.role == "user") last_user = m.content;
    }
    if (last_user.find(*turn.expect) == std::string::npos) {
      throw ChatError("scripted turn " + std::to_string(next_) + " expected prompt containing '" +
                      *turn.expect + "'");
    }
  }
  return turn.response;
}

std::vector<ChatRequest> ScriptedChatEndpoint::requests() const {
  std::lock_guard lock(mu_);
  return seen_;
}

std::size_t ScriptedChatEndpoint::remaining() const {
  std::lock_guard lock(mu_);
  return turns_.size() - next_;
}

}  // namespace reibun
