#include "fixtures.hpp"

#include <unordered_set>

#include "reibun/corpus.hpp"

namespace reibun::testing {

namespace {

struct Verb {
  const char* lemma;
  const char* ta_stem;
  const char* ta;
  const char* masu_stem;
  const char* nai_stem;
};

const Verb kVerbs[] = {
    {"見る", "見", "た", "見", "見"},         {"食べる", "食べ", "た", "食べ", "食べ"},
    {"読む", "読ん", "だ", "読み", "読ま"},   {"書く", "書い", "た", "書き", "書か"},
    {"行く", "行っ", "た", "行き", "行か"},   {"買う", "買っ", "た", "買い", "買わ"},
    {"話す", "話し", "た", "話し", "話さ"},   {"聞く", "聞い", "た", "聞き", "聞か"},
    {"作る", "作っ", "た", "作り", "作ら"},   {"待つ", "待っ", "た", "待ち", "待た"},
    {"使う", "使っ", "た", "使い", "使わ"},   {"会う", "会っ", "た", "会い", "会わ"},
};

const char* const kNouns[] = {"猫", "犬", "本", "学校", "先生", "映画", "音楽", "料理", "電車",
                              "友達", "日本", "東京", "会社", "天気", "部屋", "写真", "手紙", "時間",
                              "問題", "旅行", "駅", "家", "車", "花", "山", "海", "公園", "図書館",
                              "新聞", "子供", "母", "父"};
const char* const kAdjectives[] = {"大きい", "新しい", "古い", "高い", "安い",
                                   "美しい", "小さい", "面白い", "難しい", "優しい"};
const char* const kAdverbs[] = {"よく", "毎日", "すぐ", "もう", "まだ", "時々", "とても"};
const char* const kSubjectParticles[] = {"は", "が"};
const char* const kObliqueParticles[] = {"に", "で", "と", "から"};

constexpr std::size_t kVerbHead = static_cast<std::size_t>(-1);

struct Draft {
  std::string surface, lemma;
  Upos upos;
  std::size_t head;  // index into drafts, or kVerbHead
  std::string deprel;
};

}  // namespace

Sentence make_sentence(SentenceId id, const std::vector<TokenSpec>& tokens, std::optional<Level> level,
                       Source source) {
  Sentence s;
  s.id = id;
  s.level = level;
  s.source = source;
  for (const auto& t : tokens) {
    Token tok;
    tok.surface = t.surface;
    tok.lemma = t.lemma;
    tok.upos = t.upos;
    tok.head = t.head == 0 ? std::nullopt : std::optional<std::size_t>(t.head - 1);
    tok.deprel = t.deprel;
    s.tokens.push_back(std::move(tok));
  }
  return s;
}

Sentence sentence_with_upos(const std::vector<Upos>& upos, const std::vector<std::string>& surfaces) {
  std::vector<TokenSpec> specs;
  const std::size_t root = upos.size();  // last token is the root
  for (std::size_t i = 0; i < upos.size(); ++i) {
    std::string surface = i < surfaces.size() ? surfaces[i] : "w" + std::to_string(i);
    specs.push_back({surface, surface, upos[i], i + 1 == root ? 0 : root, i + 1 == root ? "root" : "dep"});
  }
  return make_sentence(0, specs);
}

SentenceGenerator::SentenceGenerator(std::uint64_t seed) : rng_(seed) {}

const std::vector<std::string>& SentenceGenerator::verb_lemmas() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& verb : kVerbs) out.emplace_back(verb.lemma);
    return out;
  }();
  return v;
}

const std::vector<std::string>& SentenceGenerator::noun_lemmas() {
  static const std::vector<std::string> v(std::begin(kNouns), std::end(kNouns));
  return v;
}

Sentence SentenceGenerator::next(SentenceId id) { return build(id, std::nullopt); }

Sentence SentenceGenerator::next_with_verb(SentenceId id, const std::string& verb_lemma) {
  for (std::size_t i = 0; i < std::size(kVerbs); ++i) {
    if (verb_lemma == kVerbs[i].lemma) return build(id, i);
  }
  throw std::invalid_argument("unknown verb " + verb_lemma);
}

Sentence SentenceGenerator::build(SentenceId id, std::optional<std::size_t> verb_choice) {
  auto pick = [this](auto& array) -> decltype(auto) {
    std::uniform_int_distribution<std::size_t> d(0, std::size(array) - 1);
    return array[d(rng_)];
  };
  auto chance = [this](double p) { return std::bernoulli_distribution(p)(rng_); };

  std::vector<Draft> d;
  auto noun_phrase = [&](const char* particle, const std::string& deprel) {
    const bool adjective = chance(0.3);
    const bool compound = chance(0.2);
    std::size_t adj_at = 0;
    if (adjective) {
      adj_at = d.size();
      const char* a = pick(kAdjectives);
      d.push_back({a, a, Upos::ADJ, 0, "amod"});
    }
    std::size_t first = d.size();
    if (compound) {
      const char* n = pick(kNouns);
      d.push_back({n, n, Upos::NOUN, first + 1, "compound"});
    }
    const std::size_t noun = d.size();
    const char* n = pick(kNouns);
    d.push_back({n, n, Upos::NOUN, kVerbHead, deprel});
    if (adjective) d[adj_at].head = noun;
    d.push_back({particle, particle, Upos::ADP, noun, "case"});
  };

  noun_phrase(pick(kSubjectParticles), "nsubj");
  if (chance(0.4)) {
    const char* a = pick(kAdverbs);
    d.push_back({a, a, Upos::ADV, kVerbHead, "advmod"});
  }
  const bool oblique = chance(0.4);
  if (oblique) noun_phrase(pick(kObliqueParticles), "obl");
  if (!oblique || chance(0.6)) noun_phrase("を", "obj");

  const Verb& v = verb_choice ? kVerbs[*verb_choice] : pick(kVerbs);
  const std::size_t verb_at = d.size();
  switch (std::uniform_int_distribution<int>(0, 3)(rng_)) {
    case 0:
      d.push_back({v.lemma, v.lemma, Upos::VERB, 0, "root"});
      break;
    case 1:
      d.push_back({v.ta_stem, v.lemma, Upos::VERB, 0, "root"});
      d.push_back({v.ta, "た", Upos::AUX, verb_at, "aux"});
      break;
    case 2:
      d.push_back({v.masu_stem, v.lemma, Upos::VERB, 0, "root"});
      d.push_back({"ます", "ます", Upos::AUX, verb_at, "aux"});
      break;
    default:
      d.push_back({v.nai_stem, v.lemma, Upos::VERB, 0, "root"});
      d.push_back({"ない", "ない", Upos::AUX, verb_at, "aux"});
      break;
  }
  if (chance(0.2)) {
    const char* p = chance(0.5) ? "よ" : "ね";
    d.push_back({p, p, Upos::PART, verb_at, "discourse"});
  }
  d.push_back({"。", "。", Upos::PUNCT, verb_at, "punct"});

  std::vector<TokenSpec> specs;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::size_t head = 0;
    if (i != verb_at) head = (d[i].head == kVerbHead ? verb_at : d[i].head) + 1;
    specs.push_back({d[i].surface, d[i].lemma, d[i].upos, head, d[i].deprel});
  }
  const Level level = kAllLevels[std::uniform_int_distribution<int>(0, 4)(rng_)];
  const Source source = std::array{Source::jpwac, Source::tatoeba, Source::wikipedia}[
      std::uniform_int_distribution<int>(0, 2)(rng_)];
  return make_sentence(id, specs, level, source);
}

std::vector<Sentence> synthetic_corpus(std::size_t n, std::uint64_t seed) {
  SentenceGenerator gen(seed);
  std::vector<Sentence> out;
  std::unordered_set<std::string> seen;
  while (out.size() < n) {
    Sentence s = gen.next(static_cast<SentenceId>(out.size()));
    if (seen.insert(dedup_key(s)).second) out.push_back(std::move(s));
  }
  return out;
}

LabeledTree random_tree(std::mt19937_64& rng, std::size_t max_nodes, const std::vector<std::string>& alphabet) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_nodes)(rng);
  std::uniform_int_distribution<std::size_t> label(0, alphabet.size() - 1);
  LabeledTree t;
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.nodes[i].label = alphabet[label(rng)];
    if (i > 0) t.nodes[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)].children.push_back(i);
  }
  t.root = 0;
  return t;
}

}  // namespace reibun::testing
