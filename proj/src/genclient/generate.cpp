#include <unordered_set>

#include "reibun/genclient.hpp"
#include "reibun/unicode.hpp"

namespace reibun {

GenerationResult generate_examples(const GenerationQuery& q, const GenerationConfig& cfg,
                                   ChatEndpoint& endpoint) {
  cfg.validate();
  ChatRequest request;
  request.messages.push_back({"user", build_prompt(q, cfg.profile)});
  request.temperature = cfg.temperature;
  request.repetition_penalty = cfg.repetition_penalty;

  const std::string word = unicode::nfkc(q.word);
  std::unordered_set<std::string> seen;
  GenerationResult out;

  while (out.rounds < cfg.max_rounds && out.sentences.size() < q.k) {
    ++out.rounds;
    for (std::string& sentence : split_completion(endpoint.complete(request))) {
      std::string key = unicode::nfkc(sentence);
      if (key.find(word) == std::string::npos) {
        ++out.dropped_missing_word;
      } else if (!seen.insert(std::move(key)).second) {
        ++out.dropped_duplicates;
      } else {
        out.sentences.push_back(std::move(sentence));
      }
    }
  }

  if (out.sentences.size() > q.k) out.sentences.resize(q.k);
  out.partial = out.sentences.size() < q.k;
  return out;
}

}  // namespace reibun
