#include "morphtag/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "morphtag/corpus.hpp"
#include "morphtag/errors.hpp"
#include "morphtag/utf8.hpp"

namespace morphtag {

LabelInventory::LabelInventory(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw MalformedLexiconLine("empty label at position " + std::to_string(i + 1));
    if (!index_.emplace(labels_[i], i).second) {
      throw MalformedLexiconLine("duplicate label '" + labels_[i] + "'");
    }
  }
}

LabelInventory LabelInventory::read(std::istream& in) {
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    const auto text = utf8::trim_right(line);
    if (!text.empty()) labels.emplace_back(text);
  }
  return LabelInventory(std::move(labels));
}

LabelInventory LabelInventory::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open labels file " + path.string());
  return read(in);
}

std::optional<std::size_t> LabelInventory::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

MorphLexicon::MorphLexicon(LabelInventory labels, LexiconOptions options)
    : labels_(std::move(labels)), options_(options) {}

void MorphLexicon::add(std::string_view form, std::span<const std::string> labels) {
  LabelSet indices;
  indices.reserve(labels.size());
  for (const auto& label : labels) {
    auto idx = labels_.find(label);
    if (!idx) throw UnknownLabel("label '" + label + "' is not in the label inventory");
    indices.push_back(static_cast<std::uint32_t>(*idx));
  }
  LabelSet& entry = entries_[std::string(form)];
  entry.insert(entry.end(), indices.begin(), indices.end());
  std::sort(entry.begin(), entry.end());
  entry.erase(std::unique(entry.begin(), entry.end()), entry.end());
}

void MorphLexicon::add_line(std::string_view line, std::size_t lineno) {
  const std::string where = lineno ? "lexicon line " + std::to_string(lineno) : std::string("lexicon line");
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos || tab == 0 || line.find('\t', tab + 1) != std::string_view::npos) {
    throw MalformedLexiconLine(where + ": expected <form>\\t<label>;<label>;...");
  }
  const std::string_view form = line.substr(0, tab);
  std::string_view rest = line.substr(tab + 1);
  std::vector<std::string> labels;
  while (true) {
    const auto semi = rest.find(';');
    const std::string_view label = rest.substr(0, semi);
    if (label.empty()) throw MalformedLexiconLine(where + ": empty label");
    labels.emplace_back(label);
    if (semi == std::string_view::npos) break;
    rest.remove_prefix(semi + 1);
  }
  try {
    add(form, labels);
  } catch (const UnknownLabel& e) {
    throw UnknownLabel(where + ": " + e.what());
  }
}

void MorphLexicon::merge(const MorphLexicon& other) {
  if (!(other.labels_ == labels_)) throw UnknownLabel("cannot merge lexicons with different label inventories");
  for (const auto& [form, set] : other.entries_) {
    LabelSet& entry = entries_[form];
    entry.insert(entry.end(), set.begin(), set.end());
    std::sort(entry.begin(), entry.end());
    entry.erase(std::unique(entry.begin(), entry.end()), entry.end());
  }
}

const MorphLexicon::LabelSet* MorphLexicon::lookup(std::string_view form) const {
  if (auto it = entries_.find(std::string(form)); it != entries_.end()) return &it->second;
  if (options_.lowercase_fallback) {
    const std::string lower = utf8::to_lower(form);
    if (lower != form) {
      if (auto it = entries_.find(lower); it != entries_.end()) return &it->second;
    }
  }
  return nullptr;
}

std::vector<double> MorphLexicon::encode_nhot(std::string_view form) const {
  std::vector<double> v(labels_.size(), 0.0);
  if (const LabelSet* set = lookup(form)) {
    for (auto idx : *set) v[idx] = 1.0;
  }
  return v;
}

MorphLexicon read_lexicon(std::istream& in, LabelInventory labels, LexiconOptions options) {
  MorphLexicon lexicon(std::move(labels), options);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = utf8::trim_right(line);
    if (text.empty()) continue;
    lexicon.add_line(text, lineno);
  }
  return lexicon;
}

MorphLexicon load_lexicon(const std::filesystem::path& path, LabelInventory labels, LexiconOptions options) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open lexicon file " + path.string());
  return read_lexicon(in, std::move(labels), options);
}

std::vector<double> encode_nhot(const MorphLexicon& lexicon, std::string_view form) {
  return lexicon.encode_nhot(form);
}

double CoverageReport::in_vocab_fraction() const {
  return tokens ? static_cast<double>(in_vocab) / static_cast<double>(tokens) : 0.0;
}
double CoverageReport::lexicon_only_fraction() const {
  return tokens ? static_cast<double>(lexicon_only) / static_cast<double>(tokens) : 0.0;
}
double CoverageReport::unknown_fraction() const {
  return tokens ? static_cast<double>(unknown) / static_cast<double>(tokens) : 0.0;
}

CoverageReport coverage(const MorphLexicon& lexicon, const TaggedCorpus& corpus, const Vocabulary& vocab) {
  CoverageReport r;
  for (const auto& s : corpus.sentences()) {
    for (const auto& t : s.tokens) {
      ++r.tokens;
      if (vocab.contains_word(t.form)) {
        ++r.in_vocab;
      } else if (lexicon.contains(t.form)) {
        ++r.lexicon_only;
      } else {
        ++r.unknown;
      }
    }
  }
  return r;
}

}  // namespace morphtag
