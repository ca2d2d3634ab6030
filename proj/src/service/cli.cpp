#include <csignal>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "reibun/service.hpp"

namespace reibun {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A value naming an existing file is replaced by the file's content.
std::string text_or_file(const std::string& value) {
  std::error_code ec;
  if (value.size() < 4096 && std::filesystem::is_regular_file(value, ec)) return read_file(value);
  return value;
}

void use_stderr_logger(const std::string& level) {
  static auto logger = [] {
    auto l = spdlog::stderr_color_mt("reibun");
    spdlog::set_default_logger(l);
    return l;
  }();
  spdlog::set_level(spdlog::level::from_str(level));
}

void emit(std::ostream& out, const Json& j, bool pretty) { out << (pretty ? j.dump(2) : j.dump()) << '\n'; }

// Engine without a corpus, for commands that only talk to chat endpoints.
std::unique_ptr<Engine> chat_only_engine(EngineConfig cfg) {
  return std::make_unique<Engine>(std::move(cfg), Corpus{}, InvertedIndex{}, std::make_unique<StubEmbeddings>());
}

std::string pairwise_csv(const PairwiseAgreement& p) {
  std::string out = "rater";
  for (const auto& r : p.rater_ids) out += "," + r;
  out += '\n';
  for (std::size_t i = 0; i < p.rater_ids.size(); ++i) {
    out += p.rater_ids[i];
    for (std::size_t j = 0; j < p.rater_ids.size(); ++j) {
      out += ',';
      if (const auto& c = p.at(i, j)) out += fmt::format("{:.3f}{}", c->estimate, i != j && c->significant() ? "*" : "");
    }
    out += '\n';
  }
  return out;
}

int serve_forever(const Engine& engine, std::ostream& out) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpService service(engine);
  const auto& cfg = engine.config();
  const int port = service.bind(cfg.host, cfg.port);
  out << "listening on " << cfg.host << ':' << port << std::endl;
  spdlog::info("serving {} sentences on {}:{}", engine.index().sentence_count(), cfg.host, port);

  std::jthread waiter([&service, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {} received, shutting down", sig);
    service.stop();
  });
  service.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Example-sentence suggestion for Japanese learners", "reibun"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::string log_level = "warn";
  bool pretty = false;
  app.add_option("--config", config_path, "TOML config file");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")->capture_default_str();
  app.add_flag("--pretty", pretty, "Indent JSON output");

  // Overrides shared by the commands that open the engine.
  std::optional<std::string> corpus, index, embeddings, embedding_mode;
  auto engine_options = [&](CLI::App* sub) {
    sub->add_option("--corpus", corpus, "CoNLL-U corpus");
    sub->add_option("--index", index, "Saved index (built in memory when omitted)");
    sub->add_option("--embeddings", embeddings, "Precomputed embeddings (JSON lines)");
    sub->add_option("--embedding-mode", embedding_mode, "stub, precomputed or remote")
        ->check(CLI::IsMember({"stub", "precomputed", "remote"}));
  };

  auto* filter = app.add_subcommand("filter-corpus", "Apply well-formedness filters and deduplication");
  std::string filter_in, filter_out;
  filter->add_option("--in", filter_in, "Input CoNLL-U")->required();
  filter->add_option("--out", filter_out, "Output CoNLL-U")->required();

  auto* build = app.add_subcommand("build-index", "Build and save the lemma index");
  std::string index_out;
  engine_options(build);
  build->add_option("--out", index_out, "Index file to write")->required();

  auto* suggest = app.add_subcommand("suggest", "Suggest example sentences for a word in context");
  std::string word, context, level;
  std::optional<std::size_t> k, window;
  engine_options(suggest);
  suggest->add_option("--word", word, "Target word as it appears in the context")->required();
  suggest->add_option("--context", context, "Context sentence, or a file holding it (text or CoNLL-U)")->required();
  suggest->add_option("--level", level, "Target level N5..N1")->required();
  suggest->add_option("--k", k, "Number of sentences");
  suggest->add_option("--window", window, "Candidates considered by the greedy step");

  auto* generate = app.add_subcommand("generate", "Generate example sentences with a chat model");
  std::optional<std::string> endpoint, model, transcript, profile;
  generate->add_option("--word", word, "Target word")->required();
  generate->add_option("--context", context, "Context sentence, or a file holding it")->required();
  generate->add_option("--level", level, "Target level N5..N1")->required();
  generate->add_option("--k", k, "Number of sentences");
  generate->add_option("--endpoint", endpoint, "Chat-completions base URL");
  generate->add_option("--model", model, "Model name sent to the endpoint");
  generate->add_option("--transcript", transcript, "Replay scripted replies instead of calling an endpoint");
  generate->add_option("--profile", profile, "plain or numbered_list")->check(CLI::IsMember({"plain", "numbered_list"}));

  auto* judge = app.add_subcommand("judge", "Rate an evaluation block with repeated judge votes");
  std::string block_path;
  std::optional<unsigned> votes;
  std::optional<std::uint64_t> seed;
  judge->add_option("--block", block_path, "Block JSON file")->required();
  judge->add_option("--votes", votes, "Number of judge requests");
  judge->add_option("--seed", seed, "Seed for the system presentation order");
  judge->add_option("--endpoint", endpoint, "Chat-completions base URL");
  judge->add_option("--model", model, "Model name sent to the endpoint");
  judge->add_option("--transcript", transcript, "Replay scripted replies instead of calling an endpoint");

  auto* icc = app.add_subcommand("evaluate-icc", "ICC(3,1) and pairwise agreement over ratings");
  std::string ratings_path, item = "level";
  double min_share = 0.5;
  double confidence = 0.95;
  std::optional<std::string> pairwise_out;
  icc->add_option("--ratings", ratings_path, "CSV with target_id,rater_id,item,value")->required();
  icc->add_option("--item", item, "Rated item (level, sense, reject, diversity or numeric)")->capture_default_str();
  icc->add_option("--min-share", min_share, "Keep raters who rated at least this share of targets")
      ->capture_default_str();
  icc->add_option("--confidence", confidence, "Confidence level of the interval")->capture_default_str();
  icc->add_option("--pairwise-out", pairwise_out, "Write the pairwise matrix as CSV");

  auto* diversity = app.add_subcommand("diversity", "Syntactic, lexical and combined diversity of a sentence list");
  std::string conllu_path;
  diversity->add_option("--conllu", conllu_path, "CoNLL-U file with the list")->required();

  auto* stats = app.add_subcommand("stats", "Corpus statistics per source");
  stats->add_option("--corpus", corpus, "CoNLL-U corpus");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::optional<std::string> host;
  std::optional<int> port;
  engine_options(serve);
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    use_stderr_logger(log_level);
    EngineConfig cfg = load_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt);
    if (corpus) cfg.corpus = *corpus;
    if (index) cfg.index = *index;
    if (embeddings) cfg.embeddings = *embeddings;
    if (embedding_mode) apply_toml(cfg, {{"embedding.mode", parse_toml_value('"' + *embedding_mode + '"')}});

    if (filter->parsed()) {
      ParseResult parsed = parse_conllu(read_file(filter_in));
      for (const auto& e : parsed.errors) spdlog::warn("{}:{}: {}", filter_in, e.line, e.message);
      const std::size_t input = parsed.sentences.size();
      CorpusFilter f(cfg.filter);
      auto kept = f.apply(std::move(parsed.sentences));
      std::ofstream o(filter_out, std::ios::binary);
      if (!o) throw std::runtime_error("cannot write " + filter_out);
      o << serialize_conllu(kept);
      Json rejected = Json::object();
      for (const auto& [reason, n] : f.counts()) {
        if (reason != FilterReason::Ok) rejected[std::string(to_string(reason))] = n;
      }
      emit(out, {{"input", input}, {"kept", kept.size()}, {"rejected", rejected}, {"parse_errors", parsed.errors.size()}},
           pretty);
      return 0;
    }

    if (build->parsed()) {
      const auto sentences = load_corpus_file(cfg.corpus);
      const InvertedIndex ix = build_index(sentences, cfg.threads);
      save_index(ix, index_out);
      emit(out, {{"sentences", ix.sentence_count()}, {"keys", ix.all_postings().size()}, {"path", index_out},
                 {"fingerprint", fmt::format("{:016x}", ix.fingerprint())}},
           pretty);
      return 0;
    }

    if (suggest->parsed()) {
      auto engine = Engine::open(cfg);
      Json req{{"word", word}, {"context", text_or_file(context)}, {"level", level}};
      if (k) req["k"] = *k;
      if (window) req["window"] = *window;
      emit(out, engine->suggest(req), pretty);
      return 0;
    }

    if (generate->parsed()) {
      if (endpoint) cfg.generation_endpoint.base_url = *endpoint;
      if (model) cfg.generation_endpoint.model = *model;
      if (transcript) cfg.generation_transcript = *transcript;
      auto engine = chat_only_engine(cfg);
      Json req{{"word", word}, {"context", text_or_file(context)}, {"level", level}};
      if (k) req["k"] = *k;
      if (profile) req["profile"] = *profile;
      emit(out, engine->generate(req), pretty);
      return 0;
    }

    if (judge->parsed()) {
      if (endpoint) cfg.judge_endpoint.base_url = *endpoint;
      if (model) cfg.judge_endpoint.model = *model;
      if (transcript) cfg.judge_transcript = *transcript;
      if (seed) cfg.judge.seed = *seed;
      auto engine = chat_only_engine(cfg);
      Json req{{"block", Json::parse(read_file(block_path))}};
      if (votes) req["votes"] = *votes;
      emit(out, engine->judge(req), pretty);
      return 0;
    }

    if (icc->parsed()) {
      std::ifstream in(ratings_path);
      if (!in) throw std::runtime_error("cannot open " + ratings_path);
      const auto records = read_ratings_csv(in);
      const auto kept = filter_raters(records, item, min_share);
      const RatingMatrix m = rating_matrix(kept, item);
      const PairwiseAgreement pw = pairwise_agreement(m, confidence);
      if (pairwise_out) {
        std::ofstream o(*pairwise_out);
        if (!o) throw std::runtime_error("cannot write " + *pairwise_out);
        o << pairwise_csv(pw);
      }
      emit(out, {{"item", item}, {"raters", m.rater_ids()}, {"icc", to_json(icc31(m, confidence))},
                 {"pairwise", to_json(pw)}},
           pretty);
      return 0;
    }

    if (diversity->parsed()) {
      ParseResult parsed = parse_conllu(read_file(conllu_path));
      if (!parsed.errors.empty()) {
        throw std::invalid_argument(fmt::format("{}:{}: {}", conllu_path, parsed.errors.front().line,
                                                parsed.errors.front().message));
      }
      emit(out, {{"sentences", parsed.sentences.size()}, {"diversity", to_json(combined_diversity(parsed.sentences))}},
           pretty);
      return 0;
    }

    if (stats->parsed()) {
      emit(out, to_json(corpus_stats(load_corpus_file(cfg.corpus))), pretty);
      return 0;
    }

    if (serve->parsed()) {
      if (host) cfg.host = *host;
      if (port) cfg.port = *port;
      auto engine = Engine::open(cfg);
      return serve_forever(*engine, out);
    }
  } catch (...) {
    auto [status, envelope] = describe_error(std::current_exception());
    err << "error: " << envelope["error"]["code"].get<std::string>() << ": "
        << envelope["error"]["message"].get<std::string>() << '\n';
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace reibun
