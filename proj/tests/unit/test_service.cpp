#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <unistd.h>

#include "fake_servers.hpp"
#include "fixtures.hpp"
#include "reibun/service.hpp"

namespace reibun {
namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

TEST(Toml, SubsetParses) {
  auto doc = parse_toml(
      "# top\n"
      "[selection]\n"
      "k = 7\n"
      "window = 40   # inline comment\n"
      "context_in_lexical = false\n"
      "\n"
      "[scoring]\n"
      "penalty_easier = 0.25\n"
      "[filter]\n"
      "final_particles = [\"よ\", \"ね\", \"か\"]\n"
      "[annotator]\n"
      "url = \"http://x:1/#not-a-comment\"\n");
  EXPECT_EQ(doc.at("selection.k").i, 7);
  EXPECT_EQ(doc.at("selection.window").i, 40);
  EXPECT_FALSE(doc.at("selection.context_in_lexical").b);
  EXPECT_EQ(doc.at("scoring.penalty_easier").f, 0.25);
  EXPECT_EQ(doc.at("filter.final_particles").array.size(), 3u);
  EXPECT_EQ(doc.at("annotator.url").s, "http://x:1/#not-a-comment");
}

TEST(Toml, ErrorsNameTheLine) {
  try {
    parse_toml("[a]\nb = 1\nc = \n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_toml("[a\n"), ConfigError);
  EXPECT_THROW(parse_toml("x = \"open\n"), ConfigError);
  EXPECT_THROW(parse_toml("x = 1\nx = 2\n"), ConfigError);
}

TEST(Config, FileThenEnvironment) {
  const fs::path path = fs::temp_directory_path() / ("reibun_cfg_" + std::to_string(::getpid()) + ".toml");
  {
    std::ofstream out(path);
    out << "[selection]\nk = 3\nwindow = 20\n[embedding]\nmode = \"stub\"\nstub_dimension = 16\n";
  }
  std::map<std::string, std::string> env{{"REIBUN_SELECTION_WINDOW", "60"}, {"REIBUN_JUDGE_VOTES", "5"}};
  auto lookup = [&](const std::string& name) -> std::optional<std::string> {
    auto it = env.find(name);
    return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
  };
  auto cfg = load_config(path, lookup);
  EXPECT_EQ(cfg.k, 3u);
  EXPECT_EQ(cfg.window, 60u);
  EXPECT_EQ(cfg.stub_dimension, 16u);
  EXPECT_EQ(cfg.judge.n_votes, 5u);

  env["REIBUN_SELECTION_K"] = "100";
  EXPECT_THROW(load_config(path, lookup).validate(), ConfigError);
  env.erase("REIBUN_SELECTION_K");
  env["REIBUN_SELECTION_THREADS"] = "many";
  EXPECT_THROW(load_config(path, lookup), ConfigError);
  fs::remove(path);

  EXPECT_THROW(load_config(fs::path("/nonexistent/reibun.toml"), lookup), ConfigError);
}

TEST(Config, DefaultsAndValidation) {
  auto cfg = load_config(std::nullopt, [](const std::string&) { return std::nullopt; });
  EXPECT_EQ(cfg.k, 5u);
  EXPECT_EQ(cfg.filter.min_tokens, 5u);
  EXPECT_EQ(cfg.filter.max_tokens, 50u);
  EXPECT_TRUE(cfg.context_in_lexical);

  EngineConfig c;
  EXPECT_THROW(apply_toml(c, parse_toml("[selection]\nnope = 1\n")), ConfigError);
  EXPECT_THROW(apply_toml(c, parse_toml("[selection]\nk = \"five\"\n")), ConfigError);
  EXPECT_THROW(apply_toml(c, parse_toml("[embedding]\nmode = \"magic\"\n")), ConfigError);
  c.embedding_mode = EmbeddingMode::Precomputed;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_FALSE(config_keys().empty());
}

// ---------------------------------------------------------------- annotator

const char* kCatConllu =
    "# text = 猫が寝る。\n"
    "1\t猫\t猫\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
    "2\tが\tが\tADP\t_\t_\t1\tcase\t_\t_\n"
    "3\t寝る\t寝る\tVERB\t_\t_\t0\troot\t_\t_\n"
    "4\t。\t。\tPUNCT\t_\t_\t3\tpunct\t_\t_\n"
    "\n";

TEST(Annotator, ParseEmbedClassifyHealth) {
  testing::FakeAnnotator fake(6);
  fake.add_parse("猫が寝る。", kCatConllu);
  AnnotatorClient client(fake.url(), std::chrono::milliseconds(2000));

  auto h = client.health();
  EXPECT_EQ(h.status, "ok");
  EXPECT_EQ(h.dimension, 6u);

  auto parsed = client.parse("猫が寝る。");
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].tokens[2].lemma, "寝る");

  fake.parse_as_json = true;
  EXPECT_EQ(client.parse("猫が寝る。")[0].tokens.size(), 4u);

  EXPECT_EQ(client.embed("猫が寝る。", 2, 4).size(), 6u);

  auto c = client.classify("猫が寝る。");
  EXPECT_EQ(c.level, Level::N4);
  double sum = 0.0;
  for (double p : c.probabilities) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Annotator, Failures) {
  testing::FakeAnnotator fake;
  AnnotatorClient client(fake.url(), std::chrono::milliseconds(2000));
  try {
    client.parse("");
    FAIL();
  } catch (const AnnotatorError& e) {
    EXPECT_EQ(e.kind(), AnnotatorError::Kind::Rejected);
  }
  fake.bad_classify_sum = true;
  try {
    client.classify("猫");
    FAIL();
  } catch (const AnnotatorError& e) {
    EXPECT_EQ(e.kind(), AnnotatorError::Kind::BadResponse);
  }
  fake.add_parse("壊れた", "1\tbroken line\n\n");
  EXPECT_THROW(client.parse("壊れた"), AnnotatorError);

  AnnotatorClient dead("http://127.0.0.1:1", std::chrono::milliseconds(300));
  try {
    dead.health();
    FAIL();
  } catch (const AnnotatorError& e) {
    EXPECT_EQ(e.kind(), AnnotatorError::Kind::Unreachable);
  }
}

// ------------------------------------------------------------------- engine

class EngineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() / ("reibun_engine_" + std::to_string(::getpid())));
    fs::create_directories(*dir_);
    corpus_ = new std::vector<Sentence>(testing::synthetic_corpus(400, 77));
    std::ofstream(*dir_ / "corpus.conllu") << serialize_conllu(*corpus_);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
    delete corpus_;
  }

  EngineConfig config() const {
    EngineConfig cfg;
    cfg.corpus = *dir_ / "corpus.conllu";
    return cfg;
  }

  // A corpus sentence and the surface of its root verb.
  static std::pair<std::string, std::string> verb_context() {
    for (const auto& s : *corpus_) {
      const auto& root = s.tokens[s.root()];
      if (root.upos == Upos::VERB) return {s.surface(), root.surface};
    }
    throw std::logic_error("no verb-rooted sentence");
  }

  static fs::path* dir_;
  static std::vector<Sentence>* corpus_;
};

fs::path* EngineTest::dir_ = nullptr;
std::vector<Sentence>* EngineTest::corpus_ = nullptr;

TEST_F(EngineTest, HealthAndStats) {
  auto engine = Engine::open(config());
  EXPECT_EQ(engine->health(), (Json{{"status", "ok"}, {"index_sentences", 400}}));
  EXPECT_EQ(engine->stats()["embedding"]["mode"], "deterministic-stub");
  EXPECT_FALSE(engine->degraded());
}

TEST_F(EngineTest, SuggestFromCorpusContext) {
  auto engine = Engine::open(config());
  auto [context, word] = verb_context();
  auto out = engine->suggest({{"word", word}, {"context", context}, {"level", "N3"}, {"k", 3}});
  ASSERT_FALSE(out["items"].empty());
  EXPECT_LE(out["items"].size(), 3u);
  EXPECT_EQ(out["items"][0]["rank"], 1);
  EXPECT_EQ(out["provider"], "deterministic-stub");
  for (const auto& item : out["items"]) EXPECT_NE(item["text"], context);
}

TEST_F(EngineTest, ContextResolution) {
  testing::FakeAnnotator fake;
  fake.add_parse("猫が寝る。", kCatConllu);
  auto cfg = config();
  cfg.annotator_url = fake.url();
  auto engine = Engine::open(cfg);

  const auto& first = corpus_->front();
  EXPECT_EQ(engine->resolve_context(first.surface()).id, first.id);
  EXPECT_EQ(engine->resolve_context("  " + first.surface() + "\n").id, first.id);

  auto parsed = engine->resolve_context("猫が寝る。");
  EXPECT_EQ(parsed.id, kContextSentenceId);
  EXPECT_EQ(parsed.tokens.size(), 4u);

  auto given = engine->resolve_context(kCatConllu);
  EXPECT_EQ(given.tokens[0].surface, "猫");

  try {
    engine->resolve_context("   ");
    FAIL();
  } catch (const RequestError& e) {
    EXPECT_EQ(e.status(), 400);
  }
}

TEST_F(EngineTest, RequestValidation) {
  auto engine = Engine::open(config());
  auto status_of = [&](const Json& req) {
    try {
      engine->suggest(req);
      return 200;
    } catch (...) {
      return describe_error(std::current_exception()).first;
    }
  };
  auto [context, word] = verb_context();
  EXPECT_EQ(status_of({{"context", context}, {"level", "N3"}}), 400);
  EXPECT_EQ(status_of({{"word", word}, {"context", context}, {"level", "N7"}}), 400);
  EXPECT_EQ(status_of({{"word", word}, {"context", context}, {"level", "N3"}, {"k", 0}}), 400);
  EXPECT_EQ(status_of({{"word", word}, {"context", context}, {"level", "N3"}, {"k", 5}, {"window", 2}}), 400);
  EXPECT_EQ(status_of({{"word", "存在しない"}, {"context", context}, {"level", "N3"}}), 422);
  EXPECT_EQ(status_of(Json::array()), 400);
}

TEST_F(EngineTest, DegradedModeFallsBackToPrecomputed) {
  auto cfg = config();
  cfg.embedding_mode = EmbeddingMode::Remote;
  cfg.annotator_url = "http://127.0.0.1:1";
  cfg.annotator_timeout = std::chrono::milliseconds(300);
  EXPECT_THROW(Engine::open(cfg), EmbeddingError);

  cfg.embeddings = *dir_ / "vectors.jsonl";
  std::ofstream(cfg.embeddings) << R"({"sentence_id": 0, "span_start": 0, "span_end": 1, "vector": [1, 0]})" << "\n";
  auto engine = Engine::open(cfg);
  EXPECT_TRUE(engine->degraded());
  EXPECT_EQ(engine->health()["degraded"], true);
  EXPECT_EQ(engine->provider().mode(), ProviderMode::PrecomputedFile);
}

TEST_F(EngineTest, GenerateAndJudgeUseChatFactory) {
  auto engine = Engine::open(config());
  std::vector<std::string> scripted{"1. テレビを見る。\n2. 映画を見る。"};
  engine->set_chat_factory([&](const HttpChatConfig&, const fs::path&) {
    std::vector<ScriptedChatEndpoint::Turn> turns;
    for (const auto& s : scripted) turns.push_back({s, std::nullopt});
    return std::make_unique<ScriptedChatEndpoint>(turns);
  });
  auto gen = engine->generate({{"word", "見る"}, {"context", "空を見る。"}, {"level", "N5"}, {"k", 2}});
  EXPECT_EQ(gen["sentences"].size(), 2u);
  EXPECT_EQ(gen["partial"], false);
  EXPECT_NE(gen["prompt"].get<std::string>().find("write 2 N5"), std::string::npos);

  Json block{{"block_id", "b"},
             {"word", "見る"},
             {"context", "空を見る。"},
             {"target_level", "N5"},
             {"systems", {{{"system_id", "ours"}, {"sentences", {"テレビを見る。"}}}}}};
  const std::string reply =
      R"({"systems": [{"system": "A", "sentences": [{"level": "N5", "sense": "similar", "reject": false}],)"
      R"( "diversity": "Low"}], "ranking": ["A"]})";
  scripted = {reply, reply, reply};
  auto judged = engine->judge({{"block", block}});
  EXPECT_EQ(judged.dump().find("unclear"), std::string::npos);
  EXPECT_THROW(engine->judge({{"block", {{"word", "x"}}}}), RequestError);
}

// --------------------------------------------------------------------- HTTP

class HttpTest : public EngineTest {
 protected:
  void SetUp() override {
    engine_ = Engine::open(config());
    service_ = std::make_unique<HttpService>(*engine_);
    port_ = service_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { service_->run(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(std::chrono::seconds(10));
    for (int i = 0; i < 100 && !client_->Get("/health"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  void TearDown() override {
    service_->stop();
    thread_.join();
  }

  std::unique_ptr<Engine> engine_;
  std::unique_ptr<HttpService> service_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpTest, HealthOnBothPrefixes) {
  for (const char* path : {"/health", "/v1/health"}) {
    auto res = client_->Get(path);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(Json::parse(res->body), (Json{{"status", "ok"}, {"index_sentences", 400}}));
  }
  auto missing = client_->Get("/v1/nothing");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(Json::parse(missing->body)["error"]["code"], "not_found");
}

TEST_F(HttpTest, StatusCodes) {
  auto bad = client_->Post("/v1/suggest", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(Json::parse(bad->body)["error"]["code"], "malformed_json");

  auto [context, word] = verb_context();
  auto wrong_word = client_->Post("/v1/suggest", Json{{"word", "存在しない"}, {"context", context}, {"level", "N3"}}.dump(),
                                  "application/json");
  ASSERT_TRUE(wrong_word);
  EXPECT_EQ(wrong_word->status, 422);
  EXPECT_EQ(Json::parse(wrong_word->body)["error"]["code"], "not_in_context");

  // a lemma absent from the index is an empty result, not an error
  auto s = testing::make_sentence(kContextSentenceId, {{"珍獣", "珍獣", Upos::NOUN, 3, "nsubj"},
                                                       {"が", "が", Upos::ADP, 1, "case"},
                                                       {"いる", "いる", Upos::VERB, 0, "root"}});
  auto empty = client_->Post("/v1/suggest",
                             Json{{"word", "珍獣"}, {"context", serialize_conllu({s})}, {"level", "N3"}}.dump(),
                             "application/json");
  ASSERT_TRUE(empty);
  EXPECT_EQ(empty->status, 200);
  auto body = Json::parse(empty->body);
  EXPECT_TRUE(body["items"].empty());
  EXPECT_TRUE(body["empty_reason"].is_string());
}

TEST_F(HttpTest, SuggestMatchesEngineAndCli) {
  auto [context, word] = verb_context();
  Json req{{"word", word}, {"context", context}, {"level", "N4"}};
  auto res = client_->Post("/suggest", req.dump(), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const Json via_http = Json::parse(res->body);
  EXPECT_EQ(via_http, engine_->suggest(req));

  std::ostringstream out, err;
  int code = run_cli({"suggest", "--corpus", config().corpus.string(), "--word", word, "--context", context, "--level",
                      "N4"},
                     out, err);
  ASSERT_EQ(code, 0) << err.str();
  auto cli = Json::parse(out.str());
  EXPECT_EQ(cli, via_http);
}

// ---------------------------------------------------------------------- CLI

TEST_F(EngineTest, CliExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"--help"}, out, err), 0);
  EXPECT_NE(out.str().find("suggest"), std::string::npos);

  out.str("");
  EXPECT_EQ(run_cli({}, out, err), 2);
  EXPECT_EQ(run_cli({"suggest", "--word", "x"}, out, err), 2);
  EXPECT_EQ(run_cli({"no-such-command"}, out, err), 2);

  err.str("");
  EXPECT_EQ(run_cli({"stats", "--corpus", "/nonexistent.conllu"}, out, err), 1);
  EXPECT_NE(err.str().find("error:"), std::string::npos);

  out.str("");
  EXPECT_EQ(run_cli({"stats", "--corpus", config().corpus.string()}, out, err), 0);
  EXPECT_FALSE(Json::parse(out.str()).empty());
}

TEST_F(EngineTest, CliBuildIndexAndFilter) {
  std::ostringstream out, err;
  const fs::path ix = *dir_ / "corpus.idx";
  ASSERT_EQ(run_cli({"build-index", "--corpus", config().corpus.string(), "--out", ix.string()}, out, err), 0)
      << err.str();
  EXPECT_EQ(Json::parse(out.str())["sentences"], 400);
  EXPECT_TRUE(fs::exists(ix));

  auto [context, word] = verb_context();
  out.str("");
  EXPECT_EQ(run_cli({"suggest", "--corpus", config().corpus.string(), "--index", ix.string(), "--word", word,
                     "--context", context, "--level", "N2", "--k", "2"},
                    out, err),
            0)
      << err.str();
  EXPECT_LE(Json::parse(out.str())["items"].size(), 2u);

  out.str("");
  const fs::path filtered = *dir_ / "filtered.conllu";
  ASSERT_EQ(run_cli({"filter-corpus", "--in", config().corpus.string(), "--out", filtered.string()}, out, err), 0);
  EXPECT_EQ(Json::parse(out.str())["kept"], 400);
}

TEST(Binary, HelpRuns) {
  const std::string cmd = std::string(REIBUN_CLI_PATH) + " --help";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string text;
  char buf[256];
  while (std::fgets(buf, sizeof buf, pipe)) text += buf;
  EXPECT_EQ(::pclose(pipe), 0);
  EXPECT_NE(text.find("serve"), std::string::npos);
}

}  // namespace
}  // namespace reibun
