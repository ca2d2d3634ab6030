#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_map>

#include <boost/tokenizer.hpp>

#include "reibun/evalstats.hpp"

namespace reibun {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string normalize_label(std::string_view s) {
  std::string out;
  for (char c : s) out += c == ' ' || c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<double> labels_to_numeric(std::span<const std::string> labels,
                                      std::span<const std::string> scale) {
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    auto it = std::find(scale.begin(), scale.end(), label);
    if (it == scale.end()) throw std::invalid_argument("label '" + label + "' is not on the scale");
    out.push_back(static_cast<double>(it - scale.begin() + 1));
  }
  return out;
}

const std::vector<std::string>& level_scale() {
  static const std::vector<std::string> s{"N5", "N4", "N3", "N2", "N1"};
  return s;
}

const std::vector<std::string>& diversity_scale() {
  static const std::vector<std::string> s{"Low", "Medium", "High"};
  return s;
}

const std::vector<std::string>& sense_scale() {
  static const std::vector<std::string> s{"not_similar", "similar"};
  return s;
}

const std::vector<std::string>& reject_scale() {
  static const std::vector<std::string> s{"false", "true"};
  return s;
}

const std::vector<std::string>* scale_for_item(std::string_view item) {
  const std::string name = normalize_label(item);
  if (name == "level" || name == "difficulty") return &level_scale();
  if (name == "diversity" || name == "syntax_diversity") return &diversity_scale();
  if (name == "sense") return &sense_scale();
  if (name == "reject") return &reject_scale();
  return nullptr;
}

std::vector<RatingRecord> read_ratings_csv(std::istream& in) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    for (const auto& f : Tokenizer(line)) fields.push_back(trim(f));
    return fields;
  };

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split(line);
  }
  if (header.empty()) throw RatingsFormatError("ratings CSV is empty");
  auto column = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw RatingsFormatError("ratings CSV lacks column " + std::string(name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_target = column("target_id"), c_rater = column("rater_id"),
                    c_item = column("item"), c_value = column("value");

  std::vector<RatingRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    try {
      f = split(line);
    } catch (const boost::escaped_list_error& e) {
      throw RatingsFormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (f.size() != header.size()) {
      throw RatingsFormatError("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields");
    }
    out.push_back({f[c_target], f[c_rater], f[c_item], f[c_value]});
  }
  return out;
}

std::vector<RatingRecord> filter_raters(std::span<const RatingRecord> records, std::string_view item,
                                        double min_share) {
  std::set<std::string> targets;
  std::unordered_map<std::string, std::set<std::string>> per_rater;
  for (const auto& r : records) {
    if (r.item != item) continue;
    targets.insert(r.target_id);
    per_rater[r.rater_id].insert(r.target_id);
  }
  std::vector<RatingRecord> out;
  for (const auto& r : records) {
    if (r.item != item) continue;
    const double share = static_cast<double>(per_rater[r.rater_id].size()) / static_cast<double>(targets.size());
    if (share >= min_share) out.push_back(r);
  }
  return out;
}

RatingMatrix rating_matrix(std::span<const RatingRecord> records, std::string_view item) {
  const std::vector<std::string>* scale = scale_for_item(item);
  std::vector<std::string> targets, raters;
  std::unordered_map<std::string, std::size_t> target_pos, rater_pos;
  for (const auto& r : records) {
    if (r.item != item) continue;
    if (target_pos.emplace(r.target_id, targets.size()).second) targets.push_back(r.target_id);
    if (rater_pos.emplace(r.rater_id, raters.size()).second) raters.push_back(r.rater_id);
  }

  RatingMatrix m(targets, raters);
  for (const auto& r : records) {
    if (r.item != item) continue;
    std::optional<double> value;
    if (scale) {
      const std::string want = scale == &sense_scale() || scale == &reject_scale() ? normalize_label(r.value) : r.value;
      auto it = std::find(scale->begin(), scale->end(), want);
      if (it != scale->end()) value = static_cast<double>(it - scale->begin() + 1);
    } else {
      value = parse_number(r.value);
    }
    if (!value) throw RatingsFormatError("bad " + std::string(item) + " value '" + r.value + "'");
    auto& cell = m.at(target_pos[r.target_id], rater_pos[r.rater_id]);
    if (cell) throw RatingsFormatError("repeated rating for target " + r.target_id + " by " + r.rater_id);
    cell = value;
  }
  return m;
}

RankFirstCounts rank_first_counts(std::span<const RankingRecord> rankings) {
  RankFirstCounts out;
  if (rankings.empty()) return out;
  std::set<std::string> systems(rankings.front().ranking.begin(), rankings.front().ranking.end());
  for (const auto& r : rankings) {
    std::set<std::string> seen(r.ranking.begin(), r.ranking.end());
    if (r.ranking.empty() || seen.size() != r.ranking.size() || seen != systems) {
      throw std::invalid_argument("ranking for block " + r.block_id + " by " + r.rater_id +
                                  " is not a permutation of the systems");
    }
    ++out[r.target_level][r.rater_id][r.ranking.front()];
  }
  return out;
}

}  // namespace reibun
