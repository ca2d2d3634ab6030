#include <cmath>

#include <json.hpp>

#include "reibun/annotator.hpp"
#include "reibun/corpus.hpp"
#include "reibun/detail/http.hpp"

namespace reibun {

using nlohmann::json;

namespace {

using Kind = AnnotatorError::Kind;

std::string check_reply(const httplib::Result& res, const std::string& base, std::string_view route) {
  const std::string where = base + std::string(route);
  if (!res) {
    if (detail::is_timeout(res.error())) throw AnnotatorError(Kind::Timeout, where + " timed out");
    throw AnnotatorError(Kind::Unreachable, where + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status >= 400 && res->status < 500) {
    throw AnnotatorError(Kind::Rejected, where + " rejected the request (HTTP " +
                                             std::to_string(res->status) + "): " + res->body);
  }
  if (res->status != 200) {
    throw AnnotatorError(Kind::Unreachable, where + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

json parse_json(const std::string& body, std::string_view route) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw AnnotatorError(Kind::BadResponse, std::string(route) + " reply is not JSON: " + e.what());
  }
}

}  // namespace

AnnotatorClient::AnnotatorClient(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  detail::split_url(base_url_);
}

AnnotatorHealth AnnotatorClient::health() const {
  const auto url = detail::split_url(base_url_);
  auto res = detail::make_client(url, timeout_)->Get(url.path_prefix + "/health");
  const json doc = parse_json(check_reply(res, base_url_, "/health"), "/health");
  AnnotatorHealth h;
  try {
    h.status = doc.value("status", "");
    h.mode = doc.value("mode", "");
    h.dimension = doc.value("dimension", std::size_t{0});
  } catch (const json::exception& e) {
    throw AnnotatorError(Kind::BadResponse, std::string("/health: ") + e.what());
  }
  return h;
}

std::vector<Sentence> AnnotatorClient::parse(std::string_view text) const {
  const auto url = detail::split_url(base_url_);
  const json request{{"text", text}};
  auto res = detail::make_client(url, timeout_)->Post(url.path_prefix + "/parse", request.dump(), "application/json");
  std::string body = check_reply(res, base_url_, "/parse");

  if (res->get_header_value("Content-Type").starts_with("application/json")) {
    try {
      body = json::parse(body).at("conllu").get<std::string>();
    } catch (const json::exception& e) {
      throw AnnotatorError(Kind::BadResponse, std::string("/parse: ") + e.what());
    }
  }
  ParseResult parsed = parse_conllu(body);
  if (!parsed.errors.empty()) {
    const auto& e = parsed.errors.front();
    throw AnnotatorError(Kind::BadResponse,
                         "/parse returned invalid CoNLL-U at line " + std::to_string(e.line) + ": " + e.message);
  }
  if (parsed.sentences.empty()) throw AnnotatorError(Kind::BadResponse, "/parse returned no sentences");
  return std::move(parsed.sentences);
}

std::vector<double> AnnotatorClient::embed(std::string_view text, std::size_t cp_begin, std::size_t cp_end) const {
  const auto url = detail::split_url(base_url_);
  const json request{{"text", text}, {"span", {cp_begin, cp_end}}};
  auto res = detail::make_client(url, timeout_)->Post(url.path_prefix + "/embed", request.dump(), "application/json");
  const json doc = parse_json(check_reply(res, base_url_, "/embed"), "/embed");
  try {
    auto vec = doc.at("vector").get<std::vector<double>>();
    if (doc.contains("dimension") && doc["dimension"].get<std::size_t>() != vec.size()) {
      throw AnnotatorError(Kind::BadResponse, "/embed dimension does not match vector length");
    }
    return vec;
  } catch (const json::exception& e) {
    throw AnnotatorError(Kind::BadResponse, std::string("/embed: ") + e.what());
  }
}

LevelDistribution AnnotatorClient::classify(std::string_view text) const {
  const auto url = detail::split_url(base_url_);
  const json request{{"text", text}};
  auto res = detail::make_client(url, timeout_)->Post(url.path_prefix + "/classify", request.dump(), "application/json");
  const json doc = parse_json(check_reply(res, base_url_, "/classify"), "/classify");

  LevelDistribution out;
  try {
    auto level = parse_level(doc.at("level").get<std::string>());
    if (!level) throw AnnotatorError(Kind::BadResponse, "/classify returned an unknown level");
    out.level = *level;
    const json& probs = doc.at("probabilities");
    if (probs.is_object()) {
      for (Level l : kAllLevels) out.probabilities[rank(l) - 1] = probs.at(std::string(to_string(l))).get<double>();
    } else {
      auto v = probs.get<std::vector<double>>();
      if (v.size() != 5) throw AnnotatorError(Kind::BadResponse, "/classify must return 5 probabilities");
      std::copy(v.begin(), v.end(), out.probabilities.begin());
    }
  } catch (const json::exception& e) {
    throw AnnotatorError(Kind::BadResponse, std::string("/classify: ") + e.what());
  }
  double sum = 0.0;
  for (double p : out.probabilities) {
    if (!(p >= 0.0)) throw AnnotatorError(Kind::BadResponse, "/classify returned a negative probability");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-6) throw AnnotatorError(Kind::BadResponse, "/classify probabilities do not sum to 1");
  return out;
}

}  // namespace reibun
