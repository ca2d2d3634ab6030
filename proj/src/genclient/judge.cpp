#include <algorithm>
#include <random>
#include <set>

#include <json.hpp>

#include "judge_instructions.hpp"
#include "reibun/genclient.hpp"

namespace reibun {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string label(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
std::optional<T> strict_majority(const std::vector<T>& values) {
  for (const T& candidate : values) {
    const auto n = std::count(values.begin(), values.end(), candidate);
    if (2 * static_cast<std::size_t>(n) > values.size()) return candidate;
  }
  return std::nullopt;
}

bool parse_reject(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = lower(v.get<std::string>());
    if (s == "reject" || s == "true" || s == "yes") return true;
    if (s.empty() || s == "false" || s == "no" || s == "keep") return false;
  }
  throw JudgeError("bad reject value: " + v.dump());
}

}  // namespace

void JudgeBlock::validate() const {
  if (systems.empty()) throw std::invalid_argument("block has no systems");
  if (systems.size() > 26) throw std::invalid_argument("block has more than 26 systems");
  std::set<std::string> ids;
  for (const auto& s : systems) {
    if (!ids.insert(s.system_id).second) throw std::invalid_argument("duplicate system id " + s.system_id);
    if (s.sentences.empty()) throw std::invalid_argument("system " + s.system_id + " has no sentences");
  }
}

std::string_view to_string(Sense s) { return s == Sense::Similar ? "similar" : "not similar"; }

std::string_view to_string(DiversityRating d) {
  switch (d) {
    case DiversityRating::Low: return "Low";
    case DiversityRating::Medium: return "Medium";
    case DiversityRating::High: return "High";
  }
  return "?";
}

std::optional<Sense> parse_sense(std::string_view s) {
  const std::string l = lower(s);
  if (l == "similar") return Sense::Similar;
  if (l == "not similar" || l == "not_similar" || l == "not-similar") return Sense::NotSimilar;
  return std::nullopt;
}

std::optional<DiversityRating> parse_diversity_rating(std::string_view s) {
  const std::string l = lower(s);
  if (l == "low") return DiversityRating::Low;
  if (l == "medium") return DiversityRating::Medium;
  if (l == "high") return DiversityRating::High;
  return std::nullopt;
}

std::vector<std::size_t> presentation_order(std::size_t n_systems, std::uint64_t seed) {
  std::vector<std::size_t> order(n_systems);
  for (std::size_t i = 0; i < n_systems; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n_systems; i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::string build_judge_prompt(const JudgeBlock& block, std::span<const std::size_t> presented) {
  std::string p = detail::kJudgeInstructions;
  p += "\nTarget word: " + block.word;
  p += "\nContext sentence: " + block.context;
  p += "\nTarget level: " + std::string(to_string(block.target_level)) + "\n";
  for (std::size_t i = 0; i < presented.size(); ++i) {
    p += "\nSystem " + label(i) + ":\n";
    const auto& sentences = block.systems.at(presented[i]).sentences;
    for (std::size_t j = 0; j < sentences.size(); ++j) {
      p += std::to_string(j + 1) + ". " + sentences[j] + "\n";
    }
  }
  p +=
      "\nReply with one JSON object and nothing else, in this form:\n"
      "{\"systems\": [{\"system\": \"A\", \"sentences\": [{\"level\": \"N3\", \"sense\": \"similar\", "
      "\"reject\": false}], \"diversity\": \"Medium\"}], \"ranking\": [\"A\"], \"comment\": \"...\"}\n"
      "Include every system once, with one entry per sentence in the order shown. "
      "\"ranking\" lists every system label, best first.\n";
  return p;
}

JudgeRating parse_judge_reply(std::string_view reply, const JudgeBlock& block,
                              std::span<const std::size_t> presented) {
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw JudgeError("reply contains no JSON object");
  }
  json doc;
  try {
    doc = json::parse(reply.substr(open, close - open + 1));
  } catch (const json::exception& e) {
    throw JudgeError(std::string("reply is not valid JSON: ") + e.what());
  }

  const std::size_t n = presented.size();
  JudgeRating out;
  out.systems.resize(block.systems.size());
  std::vector<bool> rated(block.systems.size(), false);
  try {
    const auto& systems = doc.at("systems");
    if (!systems.is_array() || systems.size() != n) throw JudgeError("expected one entry per system");
    for (const auto& entry : systems) {
      const std::string name = entry.at("system").get<std::string>();
      if (name.size() != 1 || name[0] < 'A' || static_cast<std::size_t>(name[0] - 'A') >= n) {
        throw JudgeError("unknown system label " + name);
      }
      const std::size_t idx = presented[static_cast<std::size_t>(name[0] - 'A')];
      if (rated[idx]) throw JudgeError("system " + name + " rated twice");
      rated[idx] = true;

      SystemRating& sr = out.systems[idx];
      const auto& sentences = entry.at("sentences");
      if (!sentences.is_array() || sentences.size() != block.systems[idx].sentences.size()) {
        throw JudgeError("system " + name + ": wrong number of sentence ratings");
      }
      for (const auto& s : sentences) {
        SentenceRating r;
        auto level = parse_level(s.at("level").get<std::string>());
        if (!level) throw JudgeError("bad level " + s.at("level").dump());
        auto sense = parse_sense(s.at("sense").get<std::string>());
        if (!sense) throw JudgeError("bad sense " + s.at("sense").dump());
        r.level = *level;
        r.sense = *sense;
        r.reject = s.contains("reject") ? parse_reject(s.at("reject")) : false;
        sr.sentences.push_back(r);
      }
      auto diversity = parse_diversity_rating(entry.at("diversity").get<std::string>());
      if (!diversity) throw JudgeError("bad diversity " + entry.at("diversity").dump());
      sr.syntax_diversity = *diversity;
    }

    const auto& ranking = doc.at("ranking");
    if (!ranking.is_array() || ranking.size() != n) throw JudgeError("ranking must list every system");
    std::vector<bool> ranked(n, false);
    for (const auto& r : ranking) {
      const std::string name = r.get<std::string>();
      if (name.size() != 1 || name[0] < 'A' || static_cast<std::size_t>(name[0] - 'A') >= n) {
        throw JudgeError("unknown system label in ranking: " + name);
      }
      const std::size_t pos = static_cast<std::size_t>(name[0] - 'A');
      if (ranked[pos]) throw JudgeError("ranking repeats " + name);
      ranked[pos] = true;
      out.ranking.push_back(block.systems[presented[pos]].system_id);
    }
    if (doc.contains("comment") && doc["comment"].is_string()) out.comment = doc["comment"].get<std::string>();
  } catch (const json::exception& e) {
    throw JudgeError(std::string("reply does not follow the contract: ") + e.what());
  }
  return out;
}

MajorityRating majority_vote(std::span<const JudgeRating> votes, const JudgeBlock& block) {
  if (votes.empty()) throw JudgeError("no valid votes");
  MajorityRating out;
  out.systems.resize(block.systems.size());
  for (std::size_t s = 0; s < block.systems.size(); ++s) {
    std::vector<DiversityRating> diversity;
    for (const auto& v : votes) diversity.push_back(v.systems.at(s).syntax_diversity);
    out.systems[s].syntax_diversity = strict_majority(diversity);

    for (std::size_t j = 0; j < block.systems[s].sentences.size(); ++j) {
      std::vector<Level> levels;
      std::vector<Sense> senses;
      std::vector<bool> rejects;
      for (const auto& v : votes) {
        const SentenceRating& r = v.systems.at(s).sentences.at(j);
        levels.push_back(r.level);
        senses.push_back(r.sense);
        rejects.push_back(r.reject);
      }
      out.systems[s].sentences.push_back(
          {strict_majority(levels), strict_majority(senses), strict_majority(rejects)});
    }
  }
  for (std::size_t pos = 0; pos < block.systems.size(); ++pos) {
    std::vector<std::string> at_pos;
    for (const auto& v : votes) at_pos.push_back(v.ranking.at(pos));
    out.ranking.push_back(strict_majority(at_pos));
  }
  return out;
}

JudgeOutcome judge_block(const JudgeBlock& block, ChatEndpoint& endpoint, const JudgeConfig& cfg) {
  block.validate();
  if (cfg.n_votes == 0) throw std::invalid_argument("n_votes must be at least 1");

  JudgeOutcome out;
  out.presented = presentation_order(block.systems.size(), cfg.seed ^ fnv1a(block.block_id));
  ChatRequest request;
  request.messages.push_back({"user", build_judge_prompt(block, out.presented)});
  request.temperature = cfg.temperature;

  std::vector<JudgeRating> valid;
  for (unsigned i = 0; i < cfg.n_votes; ++i) {
    const std::string reply = endpoint.complete(request);
    try {
      valid.push_back(parse_judge_reply(reply, block, out.presented));
      out.votes.emplace_back(valid.back());
      out.vote_errors.emplace_back();
    } catch (const JudgeError& e) {
      out.votes.emplace_back(std::nullopt);
      out.vote_errors.emplace_back(e.what());
    }
  }
  if (valid.empty()) throw JudgeError("all " + std::to_string(cfg.n_votes) + " judge replies were invalid");
  out.majority = majority_vote(valid, block);
  return out;
}

}  // namespace reibun
