#include <charconv>
#include <sstream>

#include "reibun/corpus.hpp"

namespace reibun {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename Int>
bool parse_int(std::string_view text, Int& value) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

struct Block {
  std::size_t first_line = 0;
  std::size_t index = 0;
  std::optional<SentenceId> sent_id;
  std::optional<Level> level;
  Source source = Source::other;
  std::vector<Token> tokens;
  std::optional<ParseError> error;
};

class Reader {
 public:
  ParseResult run(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view view = line;
      if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
      if (trim(view).empty()) {
        flush();
        continue;
      }
      if (!open_) open(lineno);
      if (view.front() == '#') {
        comment(view);
      } else if (!block_.error) {
        token_line(view, lineno);
      }
    }
    flush();
    return std::move(result_);
  }

 private:
  void open(std::size_t lineno) {
    block_ = Block{};
    block_.first_line = lineno;
    block_.index = next_index_++;
    open_ = true;
  }

  void fail(std::size_t lineno, std::string message) {
    if (!block_.error) block_.error = ParseError{lineno, block_.index, std::move(message)};
  }

  void comment(std::string_view line) {
    line.remove_prefix(1);
    auto eq = line.find('=');
    if (eq == std::string_view::npos) return;
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "sent_id") {
      SentenceId id = 0;
      if (parse_int(value, id)) block_.sent_id = id;
    } else if (key == "level") {
      block_.level = parse_level(value);
    } else if (key == "source") {
      block_.source = parse_source(value);
    }
  }

  void token_line(std::string_view line, std::size_t lineno) {
    auto cols = split_tabs(line);
    if (cols.size() != 10) {
      fail(lineno, "line " + std::to_string(lineno) + ": expected 10 tab-separated columns, got " +
                       std::to_string(cols.size()));
      return;
    }
    if (cols[0].find_first_of("-.") != std::string_view::npos) return;

    std::size_t id = 0;
    if (!parse_int(cols[0], id) || id != block_.tokens.size() + 1) {
      fail(lineno, "line " + std::to_string(lineno) + ": bad token ID '" + std::string(cols[0]) + "'");
      return;
    }
    std::size_t head = 0;
    if (!parse_int(cols[6], head)) {
      fail(lineno, "line " + std::to_string(lineno) + ": non-integer HEAD '" + std::string(cols[6]) + "'");
      return;
    }
    auto upos = parse_upos(cols[3]);
    if (!upos) {
      fail(lineno, "line " + std::to_string(lineno) + ": unknown UPOS '" + std::string(cols[3]) + "'");
      return;
    }
    if (cols[1].empty() || cols[2].empty()) {
      fail(lineno, "line " + std::to_string(lineno) + ": empty FORM or LEMMA");
      return;
    }
    Token token;
    token.surface = std::string(cols[1]);
    token.lemma = std::string(cols[2]);
    token.upos = *upos;
    if (head > 0) token.head = head - 1;
    if (cols[7] != "_") token.deprel = std::string(cols[7]);
    block_.tokens.push_back(std::move(token));
    head_lines_.push_back(lineno);
  }

  void flush() {
    if (!open_) return;
    open_ = false;
    std::vector<std::size_t> lines = std::move(head_lines_);
    head_lines_.clear();
    if (block_.error) {
      result_.errors.push_back(std::move(*block_.error));
      return;
    }
    if (block_.tokens.empty()) return;  // comment-only block

    for (std::size_t i = 0; i < block_.tokens.size(); ++i) {
      const auto& head = block_.tokens[i].head;
      if (head && *head >= block_.tokens.size()) {
        result_.errors.push_back({lines[i], block_.index,
                                  "line " + std::to_string(lines[i]) + ": head out of range"});
        return;
      }
    }
    if (auto problem = validate_tree(block_.tokens)) {
      result_.errors.push_back({block_.first_line, block_.index,
                                "sentence starting at line " + std::to_string(block_.first_line) +
                                    ": " + *problem});
      return;
    }
    Sentence s;
    s.id = block_.sent_id.value_or(static_cast<SentenceId>(block_.index));
    s.tokens = std::move(block_.tokens);
    s.source = block_.source;
    s.level = block_.level;
    result_.sentences.push_back(std::move(s));
  }

  ParseResult result_;
  Block block_;
  bool open_ = false;
  std::size_t next_index_ = 0;
  std::vector<std::size_t> head_lines_;
};

}  // namespace

ParseResult parse_conllu(std::istream& in) { return Reader{}.run(in); }

ParseResult parse_conllu(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in);
}

void write_conllu(std::ostream& out, const Sentence& s) {
  out << "# sent_id = " << s.id << '\n';
  out << "# text = " << s.surface() << '\n';
  out << "# source = " << to_string(s.source) << '\n';
  if (s.level) out << "# level = " << to_string(*s.level) << '\n';
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const Token& t = s.tokens[i];
    out << (i + 1) << '\t' << t.surface << '\t' << t.lemma << '\t' << to_string(t.upos)
        << "\t_\t_\t" << (t.head ? *t.head + 1 : 0) << '\t' << (t.deprel.empty() ? "_" : t.deprel)
        << "\t_\t_\n";
  }
  out << '\n';
}

std::string serialize_conllu(const std::vector<Sentence>& sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) write_conllu(out, s);
  return out.str();
}

}  // namespace reibun
