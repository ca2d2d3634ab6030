#include <algorithm>
#include <chrono>
#include <ctime>
#include <thread>

#include "reibun/index.hpp"

namespace reibun {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0xff;
  h *= kFnvPrime;
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

using Shard = std::unordered_map<std::string, std::vector<SentenceId>>;

Shard build_shard(std::span<const Sentence> sentences) {
  Shard shard;
  for (const auto& s : sentences) {
    for (auto& key : lemma_keys(s)) shard[key].push_back(s.id);
  }
  return shard;
}

}  // namespace

std::uint64_t corpus_fingerprint(std::span<const Sentence> sentences) {
  std::vector<const Sentence*> ordered;
  ordered.reserve(sentences.size());
  for (const auto& s : sentences) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const Sentence* a, const Sentence* b) { return a->id < b->id; });
  std::uint64_t h = kFnvOffset;
  for (const Sentence* s : ordered) {
    fnv_mix(h, std::to_string(s->id));
    fnv_mix(h, s->level ? to_string(*s->level) : "-");
    for (const auto& t : s->tokens) {
      fnv_mix(h, t.surface);
      fnv_mix(h, t.lemma);
      fnv_mix(h, to_string(t.upos));
    }
  }
  return h;
}

std::span<const SentenceId> InvertedIndex::postings(std::string_view key) const {
  auto it = postings_.find(std::string(key));
  if (it == postings_.end()) return {};
  return it->second;
}

std::vector<std::string> InvertedIndex::sorted_keys() const {
  std::vector<std::string> keys;
  keys.reserve(postings_.size());
  for (const auto& [key, _] : postings_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

bool InvertedIndex::operator==(const InvertedIndex& other) const {
  return doc_count_ == other.doc_count_ && sentence_count_ == other.sentence_count_ &&
         fingerprint_ == other.fingerprint_ && built_at_ == other.built_at_ &&
         postings_ == other.postings_;
}

InvertedIndex build_index(std::span<const Sentence> sentences, unsigned threads) {
  {
    std::vector<SentenceId> ids;
    ids.reserve(sentences.size());
    for (const auto& s : sentences) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) throw IndexError("duplicate sentence id " + std::to_string(*dup));
  }

  threads = std::max(1u, threads);
  const std::size_t shard_count = std::min<std::size_t>(threads, std::max<std::size_t>(1, sentences.size()));
  std::vector<Shard> shards(shard_count);
  if (shard_count == 1) {
    shards[0] = build_shard(sentences);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (sentences.size() + shard_count - 1) / shard_count;
    for (std::size_t k = 0; k < shard_count; ++k) {
      std::size_t begin = std::min(sentences.size(), k * chunk);
      std::size_t len = std::min(chunk, sentences.size() - begin);
      workers.emplace_back([&shards, k, part = sentences.subspan(begin, len)] {
        shards[k] = build_shard(part);
      });
    }
  }

  InvertedIndex ix;
  ix.postings_ = std::move(shards[0]);
  for (std::size_t k = 1; k < shards.size(); ++k) {
    for (auto& [key, ids] : shards[k]) {
      auto& dst = ix.postings_[key];
      dst.insert(dst.end(), ids.begin(), ids.end());
    }
  }
  for (auto& [_, ids] : ix.postings_) std::sort(ids.begin(), ids.end());

  SentenceId max_id = 0;
  for (const auto& s : sentences) max_id = std::max(max_id, s.id);
  ix.doc_count_ = sentences.empty() ? 0 : static_cast<std::uint64_t>(max_id) + 1;
  ix.sentence_count_ = sentences.size();
  ix.fingerprint_ = corpus_fingerprint(sentences);
  ix.built_at_ = utc_timestamp();
  return ix;
}

std::span<const SentenceId> lookup(const InvertedIndex& ix, const QueryLemma& q) {
  return ix.postings(q.content_lemma);
}

}  // namespace reibun
