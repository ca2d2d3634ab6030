#include <fmt/format.h>

#include "reibun/genclient.hpp"
#include "reibun/unicode.hpp"

namespace reibun {

namespace {

constexpr std::string_view kNumberedListSuffix =
    " Provide sentences in Japanese in a numbered list, without any translation or romaji.";

bool is_digit(char32_t c) { return (c >= U'0' && c <= U'9') || (c >= U'０' && c <= U'９'); }

bool is_bullet(char32_t c) {
  return c == U'-' || c == U'*' || c == U'・' || c == U'•' || c == U'●' || c == U'○';
}

bool is_marker_close(char32_t c) {
  return c == U'.' || c == U'．' || c == U')' || c == U'）' || c == U'、' || c == U':' ||
         c == U'：';
}

bool is_terminator(char32_t c) { return c == U'。' || c == U'！' || c == U'？'; }

bool is_closing(char32_t c) { return c == U'」' || c == U'』' || c == U'）' || c == U')'; }

std::u32string_view trim(std::u32string_view s) {
  while (!s.empty() && unicode::is_whitespace(s.front())) s.remove_prefix(1);
  while (!s.empty() && unicode::is_whitespace(s.back())) s.remove_suffix(1);
  return s;
}

std::u32string_view strip_marker(std::u32string_view line) {
  line = trim(line);
  if (!line.empty() && is_bullet(line.front())) return trim(line.substr(1));

  std::size_t i = 0;
  const bool paren = !line.empty() && (line[0] == U'(' || line[0] == U'（');
  if (paren) ++i;
  const std::size_t digits_begin = i;
  while (i < line.size() && is_digit(line[i])) ++i;
  if (i == digits_begin || i >= line.size() || !is_marker_close(line[i])) return line;
  if (paren && line[i] != U')' && line[i] != U'）') return line;
  return trim(line.substr(i + 1));
}

}  // namespace

void GenerationConfig::validate() const {
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (repetition_penalty && !(*repetition_penalty > 0.0)) {
    throw std::invalid_argument("repetition_penalty must be > 0");
  }
}

GenerationConfig GenerationConfig::with_repetition_penalty(double penalty) {
  GenerationConfig cfg;
  cfg.repetition_penalty = penalty;
  return cfg;
}

std::string build_prompt(const GenerationQuery& q, PromptProfile profile) {
  if (q.word.empty()) throw std::invalid_argument("target word is empty");
  if (q.k == 0) throw std::invalid_argument("k must be at least 1");
  std::string prompt = fmt::format(
      "write {0} {1} example sentences in japanese, that must contain the word \"{2}\" used in a "
      "similar sense as \"{3}\". following are {0} diverse sentences that must use \"{2}\":",
      q.k, to_string(q.target_level), q.word, q.context);
  if (profile == PromptProfile::NumberedList) prompt += kNumberedListSuffix;
  return prompt;
}

std::vector<std::string> split_completion(std::string_view text) {
  const std::u32string all = unicode::decode(text);
  std::vector<std::string> out;
  auto emit = [&](std::u32string_view piece) {
    piece = trim(piece);
    if (!piece.empty()) out.push_back(unicode::encode(piece));
  };

  std::u32string_view rest(all);
  while (!rest.empty()) {
    const std::size_t nl = rest.find_first_of(U"\n\r");
    std::u32string_view line = strip_marker(rest.substr(0, nl));
    rest = nl == std::u32string_view::npos ? std::u32string_view{} : rest.substr(nl + 1);

    std::size_t start = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (!is_terminator(line[i])) continue;
      std::size_t end = i + 1;
      while (end < line.size() && (is_terminator(line[end]) || is_closing(line[end]))) ++end;
      emit(line.substr(start, end - start));
      start = end;
      i = end - 1;
    }
    emit(line.substr(start));
  }
  return out;
}

}  // namespace reibun
