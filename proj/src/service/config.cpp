#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "reibun/config.hpp"
#include "reibun/unicode.hpp"

namespace reibun {

namespace {

class ValueParser {
 public:
  explicit ValueParser(std::string_view text) : s_(text) {}

  TomlValue value() {
    skip_space();
    if (at_end()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return string_value(basic_string());
    if (c == '\'') return string_value(literal_string());
    if (c == '[') return array();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return bool_value(true);
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return bool_value(false);
    }
    return number();
  }

  /// Remaining input must be blank or a comment.
  void finish() {
    skip_space();
    if (!at_end() && s_[pos_] != '#') fail("unexpected trailing text");
  }

 private:
  static TomlValue string_value(std::string s) {
    TomlValue v;
    v.kind = TomlValue::Kind::String;
    v.s = std::move(s);
    return v;
  }

  static TomlValue bool_value(bool b) {
    TomlValue v;
    v.kind = TomlValue::Kind::Bool;
    v.b = b;
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what); }

  bool at_end() const { return pos_ >= s_.size(); }

  void skip_space() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (!at_end() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      c = s_[pos_++];
      switch (c) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
          const std::size_t len = c == 'u' ? 4 : 8;
          if (pos_ + len > s_.size()) fail("short unicode escape");
          std::uint32_t cp = 0;
          auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + pos_ + len, cp, 16);
          if (ec != std::errc() || p != s_.data() + pos_ + len) fail("bad unicode escape");
          pos_ += len;
          out += unicode::encode(std::u32string(1, static_cast<char32_t>(cp)));
          break;
        }
        default: fail(std::string("unknown escape \\") + c);
      }
    }
    if (at_end()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::string literal_string() {
    ++pos_;
    const auto end = s_.find('\'', pos_);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  TomlValue array() {
    ++pos_;
    TomlValue v;
    v.kind = TomlValue::Kind::Array;
    skip_space();
    if (!at_end() && s_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      v.array.push_back(value());
      skip_space();
      if (at_end()) fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_space();
        if (!at_end() && s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      fail("expected ',' or ']' in array");
    }
  }

  TomlValue number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '+' ||
                         s_[pos_] == '-' || s_[pos_] == '.' || s_[pos_] == '_')) {
      ++pos_;
    }
    std::string text;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') text += c;
    }
    if (text.empty()) fail("expected a value");
    if (text.front() == '+') text.erase(0, 1);
    TomlValue v;
    const bool is_float = text.find_first_of(".eE") != std::string::npos;
    const char* b = text.data();
    const char* e = text.data() + text.size();
    if (is_float) {
      v.kind = TomlValue::Kind::Float;
      auto [p, ec] = std::from_chars(b, e, v.f);
      if (ec != std::errc() || p != e) fail("bad number '" + text + "'");
    } else {
      v.kind = TomlValue::Kind::Int;
      auto [p, ec] = std::from_chars(b, e, v.i);
      if (ec != std::errc() || p != e) fail("bad value '" + text + "'");
    }
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

bool bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// ---------------------------------------------------------------- fields

struct Field {
  std::string name;
  TomlValue::Kind kind;
  std::function<void(EngineConfig&, const TomlValue&)> apply;
};

double as_float(const TomlValue& v) { return v.kind == TomlValue::Kind::Int ? static_cast<double>(v.i) : v.f; }

std::size_t as_count(const TomlValue& v, const std::string& name) {
  if (v.i < 0) throw ConfigError(name + " must be non-negative");
  return static_cast<std::size_t>(v.i);
}

std::vector<Field> make_fields() {
  using K = TomlValue::Kind;
  std::vector<Field> f;
  auto path = [&](std::string name, std::filesystem::path EngineConfig::*m) {
    f.push_back({std::move(name), K::String, [m](EngineConfig& c, const TomlValue& v) { c.*m = v.s; }});
  };
  auto str = [&](std::string name, auto setter) { f.push_back({std::move(name), K::String, setter}); };
  auto count = [&](std::string name, auto setter) {
    f.push_back({name, K::Int, [name, setter](EngineConfig& c, const TomlValue& v) { setter(c, as_count(v, name)); }});
  };
  auto real = [&](std::string name, auto setter) {
    f.push_back({std::move(name), K::Float, [setter](EngineConfig& c, const TomlValue& v) { setter(c, as_float(v)); }});
  };
  auto flag = [&](std::string name, auto setter) {
    f.push_back({std::move(name), K::Bool, [setter](EngineConfig& c, const TomlValue& v) { setter(c, v.b); }});
  };
  using ms = std::chrono::milliseconds;

  path("corpus.path", &EngineConfig::corpus);
  path("corpus.index", &EngineConfig::index);

  count("filter.min_tokens", [](EngineConfig& c, std::size_t n) { c.filter.min_tokens = n; });
  count("filter.max_tokens", [](EngineConfig& c, std::size_t n) { c.filter.max_tokens = n; });
  real("filter.max_punct_num_ratio", [](EngineConfig& c, double x) { c.filter.max_punct_num_ratio = x; });
  f.push_back({"filter.final_particles", K::Array, [](EngineConfig& c, const TomlValue& v) {
                 c.filter.final_particles.clear();
                 for (const auto& e : v.array) {
                   if (e.kind != K::String) throw ConfigError("filter.final_particles must hold strings");
                   c.filter.final_particles.insert(e.s);
                 }
               }});

  str("embedding.mode", [](EngineConfig& c, const TomlValue& v) {
    if (v.s == "stub") c.embedding_mode = EmbeddingMode::Stub;
    else if (v.s == "precomputed") c.embedding_mode = EmbeddingMode::Precomputed;
    else if (v.s == "remote") c.embedding_mode = EmbeddingMode::Remote;
    else throw ConfigError("embedding.mode must be stub, precomputed or remote");
  });
  path("embedding.path", &EngineConfig::embeddings);
  count("embedding.stub_dimension", [](EngineConfig& c, std::size_t n) { c.stub_dimension = n; });
  count("embedding.stub_seed", [](EngineConfig& c, std::size_t n) { c.stub_seed = n; });

  str("annotator.url", [](EngineConfig& c, const TomlValue& v) { c.annotator_url = v.s; });
  count("annotator.timeout_ms", [](EngineConfig& c, std::size_t n) { c.annotator_timeout = ms(n); });
  count("annotator.max_in_flight", [](EngineConfig& c, std::size_t n) { c.annotator_max_in_flight = n; });

  real("scoring.penalty_easier", [](EngineConfig& c, double x) { c.difficulty.penalty_easier = x; });
  real("scoring.penalty_harder", [](EngineConfig& c, double x) { c.difficulty.penalty_harder = x; });

  count("selection.k", [](EngineConfig& c, std::size_t n) { c.k = n; });
  count("selection.window", [](EngineConfig& c, std::size_t n) { c.window = n; });
  flag("selection.context_in_lexical", [](EngineConfig& c, bool b) { c.context_in_lexical = b; });
  str("selection.label_granularity", [](EngineConfig& c, const TomlValue& v) {
    if (v.s == "relation") c.granularity = LabelGranularity::Relation;
    else if (v.s == "class") c.granularity = LabelGranularity::Class;
    else throw ConfigError("selection.label_granularity must be relation or class");
  });
  path("selection.label_map", &EngineConfig::label_map);
  count("selection.threads", [](EngineConfig& c, std::size_t n) { c.threads = static_cast<unsigned>(n); });

  auto chat = [&](const std::string& table, HttpChatConfig EngineConfig::*ep,
                  std::filesystem::path EngineConfig::*transcript) {
    str(table + ".base_url", [ep](EngineConfig& c, const TomlValue& v) { (c.*ep).base_url = v.s; });
    str(table + ".model", [ep](EngineConfig& c, const TomlValue& v) { (c.*ep).model = v.s; });
    str(table + ".api_key", [ep](EngineConfig& c, const TomlValue& v) { (c.*ep).api_key = v.s; });
    count(table + ".timeout_ms", [ep](EngineConfig& c, std::size_t n) { (c.*ep).timeout = ms(n); });
    count(table + ".max_retries", [ep](EngineConfig& c, std::size_t n) { (c.*ep).max_retries = static_cast<unsigned>(n); });
    path(table + ".transcript", transcript);
  };
  chat("generation", &EngineConfig::generation_endpoint, &EngineConfig::generation_transcript);
  real("generation.temperature", [](EngineConfig& c, double x) { c.generation.temperature = x; });
  real("generation.repetition_penalty", [](EngineConfig& c, double x) {
    if (x == 0.0) c.generation.repetition_penalty.reset();
    else c.generation.repetition_penalty = x;
  });
  count("generation.max_rounds", [](EngineConfig& c, std::size_t n) { c.generation.max_rounds = static_cast<unsigned>(n); });
  str("generation.profile", [](EngineConfig& c, const TomlValue& v) {
    if (v.s == "plain") c.generation.profile = PromptProfile::Plain;
    else if (v.s == "numbered_list") c.generation.profile = PromptProfile::NumberedList;
    else throw ConfigError("generation.profile must be plain or numbered_list");
  });

  chat("judge", &EngineConfig::judge_endpoint, &EngineConfig::judge_transcript);
  count("judge.votes", [](EngineConfig& c, std::size_t n) { c.judge.n_votes = static_cast<unsigned>(n); });
  count("judge.seed", [](EngineConfig& c, std::size_t n) { c.judge.seed = n; });
  real("judge.temperature", [](EngineConfig& c, double x) { c.judge.temperature = x; });

  str("server.host", [](EngineConfig& c, const TomlValue& v) { c.host = v.s; });
  count("server.port", [](EngineConfig& c, std::size_t n) { c.port = static_cast<int>(n); });
  count("server.request_timeout_ms", [](EngineConfig& c, std::size_t n) { c.request_timeout = ms(n); });
  count("server.threads", [](EngineConfig& c, std::size_t n) { c.server_threads = static_cast<unsigned>(n); });
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = make_fields();
  return f;
}

bool compatible(TomlValue::Kind want, TomlValue::Kind got) {
  return want == got || (want == TomlValue::Kind::Float && got == TomlValue::Kind::Int);
}

std::string_view kind_name(TomlValue::Kind k) {
  switch (k) {
    case TomlValue::Kind::Bool: return "a boolean";
    case TomlValue::Kind::Int: return "an integer";
    case TomlValue::Kind::Float: return "a number";
    case TomlValue::Kind::String: return "a string";
    case TomlValue::Kind::Array: return "an array";
  }
  return "?";
}

std::string env_name(const std::string& key) {
  std::string out = "REIBUN_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

TomlValue parse_toml_value(std::string_view text) {
  ValueParser p(text);
  TomlValue v = p.value();
  p.finish();
  return v;
}

std::map<std::string, TomlValue> parse_toml(std::string_view text) {
  std::map<std::string, TomlValue> out;
  std::string table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto fail = [&](const std::string& what) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
    };
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) fail("unterminated table header");
      std::string_view rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') fail("text after table header");
      table = std::string(trim(line.substr(1, close - 1)));
      if (table.empty() || !std::all_of(table.begin(), table.end(), bare_key_char)) fail("bad table name");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty() || !std::all_of(key.begin(), key.end(), bare_key_char)) fail("bad key '" + key + "'");
    const std::string full = table.empty() ? key : table + "." + key;
    try {
      TomlValue v = parse_toml_value(line.substr(eq + 1));
      if (!out.emplace(full, std::move(v)).second) fail("duplicate key " + full);
    } catch (const ConfigError& e) {
      if (std::string_view(e.what()).starts_with("config line")) throw;
      fail(e.what());
    }
  }
  return out;
}

std::string_view to_string(EmbeddingMode m) {
  switch (m) {
    case EmbeddingMode::Stub: return "stub";
    case EmbeddingMode::Precomputed: return "precomputed";
    case EmbeddingMode::Remote: return "remote";
  }
  return "?";
}

void EngineConfig::validate() const {
  if (k == 0) throw ConfigError("selection.k must be at least 1");
  if (window < k) throw ConfigError("selection.window must be at least selection.k");
  if (difficulty.penalty_easier < 0.0 || difficulty.penalty_harder < 0.0) {
    throw ConfigError("difficulty penalties must be non-negative");
  }
  if (filter.min_tokens > filter.max_tokens) throw ConfigError("filter.min_tokens exceeds filter.max_tokens");
  if (embedding_mode == EmbeddingMode::Precomputed && embeddings.empty()) {
    throw ConfigError("embedding.mode = precomputed requires embedding.path");
  }
  if (stub_dimension == 0) throw ConfigError("embedding.stub_dimension must be positive");
  if (judge.n_votes == 0) throw ConfigError("judge.votes must be at least 1");
  if (threads == 0) throw ConfigError("selection.threads must be at least 1");
  try {
    generation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("generation: ") + e.what());
  }
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

void apply_toml(EngineConfig& cfg, const std::map<std::string, TomlValue>& doc) {
  for (const auto& [key, value] : doc) {
    auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) { return f.name == key; });
    if (it == fields().end()) throw ConfigError("unknown config key " + key);
    if (!compatible(it->kind, value.kind)) {
      throw ConfigError(key + " must be " + std::string(kind_name(it->kind)));
    }
    it->apply(cfg, value);
  }
}

void apply_env(EngineConfig& cfg, const EnvLookup& env) {
  for (const Field& f : fields()) {
    const std::string name = env_name(f.name);
    auto raw = env(name);
    if (!raw) continue;
    TomlValue v;
    if (f.kind == TomlValue::Kind::String) {
      v.kind = TomlValue::Kind::String;
      v.s = *raw;
    } else if (f.kind == TomlValue::Kind::Array && !raw->starts_with("[")) {
      v.kind = TomlValue::Kind::Array;
      std::stringstream ss(*raw);
      std::string part;
      while (std::getline(ss, part, ',')) {
        TomlValue e;
        e.s = std::string(trim(part));
        if (!e.s.empty()) v.array.push_back(std::move(e));
      }
    } else {
      try {
        v = parse_toml_value(*raw);
      } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
      }
      if (!compatible(f.kind, v.kind)) throw ConfigError(name + " must be " + std::string(kind_name(f.kind)));
    }
    f.apply(cfg, v);
  }
}

EngineConfig load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env) {
  EngineConfig cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config " + path->string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      apply_toml(cfg, parse_toml(ss.str()));
    } catch (const ConfigError& e) {
      throw ConfigError(path->string() + ": " + e.what());
    }
  }
  apply_env(cfg, env);
  return cfg;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.name);
  return out;
}

}  // namespace reibun
