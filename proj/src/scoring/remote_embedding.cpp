#include <json.hpp>

#include "reibun/detail/http.hpp"
#include "reibun/embedding.hpp"

namespace reibun {

namespace {

struct SemaphoreGuard {
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
  std::counting_semaphore<1024>& sem;
};

[[noreturn]] void raise_transport(httplib::Error e, const std::string& url) {
  if (detail::is_timeout(e)) throw ServiceTimeout("embedding service at " + url + " timed out");
  if (e == httplib::Error::Connection) {
    throw ServiceUnreachable("embedding service at " + url + " unreachable");
  }
  throw EmbeddingError("embedding service at " + url + ": " + httplib::to_string(e));
}

}  // namespace

RemoteEmbeddings::RemoteEmbeddings(RemoteEmbeddingConfig cfg)
    : cfg_(std::move(cfg)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(cfg_.max_in_flight, 1, 1024))) {
  dimension_ = cfg_.dimension;
  if (dimension_ != 0) return;
  auto url = detail::split_url(cfg_.base_url);
  auto client = detail::make_client(url, cfg_.timeout);
  auto res = client->Get(url.path_prefix + "/health");
  if (!res) raise_transport(res.error(), cfg_.base_url);
  if (res->status != 200) {
    throw ServiceUnreachable("embedding service /health returned " + std::to_string(res->status));
  }
  try {
    dimension_ = nlohmann::json::parse(res->body).at("dimension").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw EmbeddingError(std::string("bad /health payload: ") + e.what());
  }
  if (dimension_ == 0) throw EmbeddingError("service reports zero embedding dimension");
}

TargetEmbedding RemoteEmbeddings::embed(const Sentence& sentence, TokenSpan span) {
  check_span(sentence, span);
  auto [cp_begin, cp_end] = codepoint_offsets(sentence, span);
  nlohmann::json request = {{"text", sentence.surface()}, {"span", {cp_begin, cp_end}}};

  SemaphoreGuard guard(in_flight_);
  auto url = detail::split_url(cfg_.base_url);
  auto client = detail::make_client(url, cfg_.timeout);
  auto res = client->Post(url.path_prefix + "/embed", request.dump(), "application/json");
  if (!res) raise_transport(res.error(), cfg_.base_url);
  if (res->status != 200) {
    throw EmbeddingError("embedding service returned HTTP " + std::to_string(res->status) + ": " +
                         res->body);
  }
  std::vector<double> vec;
  try {
    vec = nlohmann::json::parse(res->body).at("vector").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw EmbeddingError(std::string("bad /embed payload: ") + e.what());
  }
  check_vector(vec, dimension_);
  return {std::move(vec), sentence.id, span};
}

}  // namespace reibun
