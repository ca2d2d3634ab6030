#include <fstream>
#include <sstream>
#include <stdexcept>

#include "deprel_map.hpp"
#include "reibun/diversity.hpp"

namespace reibun {

const LabelMap& LabelMap::builtin() {
  static const LabelMap map = [] {
    std::istringstream in(detail::kBuiltinDeprelMap);
    return parse(in);
  }();
  return map;
}

LabelMap LabelMap::parse(std::istream& in) {
  LabelMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string deprel, label, cls;
    if (!std::getline(fields, deprel, '\t') || !std::getline(fields, label, '\t') ||
        !std::getline(fields, cls, '\t') || deprel.empty() || label.empty() || cls.empty()) {
      throw std::invalid_argument("label map line " + std::to_string(lineno) +
                                  ": expected deprel<TAB>label<TAB>class");
    }
    map.entries_[deprel] = {label, cls};
  }
  return map;
}

LabelMap LabelMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open label map " + path.string());
  return parse(in);
}

std::string LabelMap::generalize(std::string_view deprel, LabelGranularity g) const {
  auto pick = [g](const Entry& e) { return g == LabelGranularity::Class ? e.cls : e.label; };
  if (auto it = entries_.find(std::string(deprel)); it != entries_.end()) return pick(it->second);
  std::string base{deprel.substr(0, deprel.find(':'))};
  if (auto it = entries_.find(base); it != entries_.end()) return pick(it->second);
  return base;
}

LabeledTree generalize_labels(const Sentence& s, const LabelMap& map, LabelGranularity g) {
  LabeledTree tree;
  tree.nodes.resize(s.tokens.size());
  auto children = s.children();
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    tree.nodes[i].label = map.generalize(s.tokens[i].deprel, g);
    tree.nodes[i].children = std::move(children[i]);
  }
  tree.root = s.tokens.empty() ? 0 : s.root();
  return tree;
}

}  // namespace reibun
