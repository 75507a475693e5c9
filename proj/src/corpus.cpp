#include "morphtag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "morphtag/errors.hpp"
#include "morphtag/utf8.hpp"

namespace morphtag {

std::vector<std::string> Sentence::forms() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.form);
  return out;
}

TaggedCorpus::TaggedCorpus(std::vector<Sentence> sentences, std::vector<int> fold_of, int num_folds,
                           std::shared_ptr<const TagInventory> inventory)
    : sentences_(std::move(sentences)),
      fold_of_(std::move(fold_of)),
      num_folds_(num_folds),
      inventory_(std::move(inventory)) {
  if (sentences_.empty()) throw EmptyCorpus("corpus contains no sentences");
  if (num_folds_ < 1) throw BadFoldId("number of folds must be positive");
  if (fold_of_.size() != sentences_.size()) {
    throw BadFoldId("fold assignment covers " + std::to_string(fold_of_.size()) +
                    " sentences but the corpus has " + std::to_string(sentences_.size()));
  }
  for (int f : fold_of_) {
    if (f != kNeverTest && (f < 0 || f >= num_folds_)) {
      throw BadFoldId("fold id " + std::to_string(f) + " outside [0, " +
                      std::to_string(num_folds_) + ")");
    }
  }
  for (const auto& s : sentences_) {
    if (s.tokens.empty()) throw EmptyCorpus("corpus contains an empty sentence");
  }
}

std::size_t TaggedCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences_) n += s.tokens.size();
  return n;
}

std::vector<Sentence> read_sentences(std::istream& in, const TagInventory* inventory) {
  std::vector<Sentence> out;
  Sentence current;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) out.push_back(std::move(current));
    current = Sentence{};
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = utf8::trim_right(line);
    if (text.empty()) {
      flush();
      continue;
    }
    const auto tab = text.find('\t');
    if (tab == std::string_view::npos || text.find('\t', tab + 1) != std::string_view::npos) {
      throw MalformedLine("line " + std::to_string(lineno) +
                          ": expected exactly one tab between form and tag");
    }
    const std::string_view form = text.substr(0, tab);
    const std::string_view tag = text.substr(tab + 1);
    if (form.empty() || tag.empty()) {
      throw MalformedLine("line " + std::to_string(lineno) + ": empty form or tag");
    }
    utf8::decode(form);
    if (inventory != nullptr && !inventory->contains(tag)) {
      throw UnknownTag("line " + std::to_string(lineno) + ": tag '" + std::string(tag) +
                       "' is not in the inventory");
    }
    try {
      if (current.tokens.empty()) current.first_line = lineno;
      current.tokens.push_back(Token{std::string(form), parse_tag(tag)});
    } catch (const TagTooLong& e) {
      throw TagTooLong("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  flush();
  return out;
}

std::vector<int> round_robin_folds(std::size_t sentences, int k) {
  if (k < 1) throw BadFoldId("number of folds must be positive");
  std::vector<int> folds(sentences);
  for (std::size_t i = 0; i < sentences; ++i) folds[i] = static_cast<int>(i % static_cast<std::size_t>(k));
  return folds;
}

std::vector<int> read_fold_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open fold file " + path.string());
  std::vector<int> folds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = utf8::trim_right(line);
    if (text.empty()) continue;
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(std::string(text), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || value < 0) {
      throw MalformedFoldFile(path.string() + ":" + std::to_string(lineno) +
                              ": expected a non-negative integer");
    }
    folds.push_back(value);
  }
  return folds;
}

namespace {

TaggedCorpus assemble(std::vector<Sentence> sentences, const FoldSource& source,
                      std::shared_ptr<const TagInventory> inventory) {
  if (sentences.empty()) throw EmptyCorpus("corpus contains no sentences");
  std::vector<int> folds;
  int k = 1;
  if (const auto* rr = std::get_if<RoundRobinFolds>(&source)) {
    k = rr->k;
    if (static_cast<std::size_t>(std::max(k, 0)) > sentences.size()) {
      throw BadFoldId("cannot split " + std::to_string(sentences.size()) + " sentences into " +
                      std::to_string(k) + " folds");
    }
    folds = round_robin_folds(sentences.size(), k);
  } else {
    const auto& file = std::get<FoldFile>(source);
    folds = read_fold_file(file.path);
    if (folds.size() != sentences.size()) {
      throw MalformedFoldFile("fold file lists " + std::to_string(folds.size()) +
                              " sentences, corpus has " + std::to_string(sentences.size()));
    }
    k = *std::max_element(folds.begin(), folds.end()) + 1;
    std::set<int> seen(folds.begin(), folds.end());
    if (static_cast<int>(seen.size()) != k) {
      throw MalformedFoldFile("fold ids do not cover [0, " + std::to_string(k) + ")");
    }
  }
  return TaggedCorpus(std::move(sentences), std::move(folds), k, std::move(inventory));
}

}  // namespace

TaggedCorpus load_corpus(std::istream& in, const FoldSource& folds,
                         std::shared_ptr<const TagInventory> inventory) {
  auto sentences = read_sentences(in, inventory.get());
  return assemble(std::move(sentences), folds, std::move(inventory));
}

TaggedCorpus load_corpus(const std::filesystem::path& path, const FoldSource& folds,
                         std::shared_ptr<const TagInventory> inventory) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open corpus file " + path.string());
  return load_corpus(in, folds, std::move(inventory));
}

std::vector<std::vector<std::string>> read_forms(std::istream& in) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view text = utf8::trim_right(line);
    if (text.empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      continue;
    }
    // Accept already-tagged input by ignoring everything after the first tab.
    const std::string_view form = text.substr(0, text.find('\t'));
    utf8::decode(form);
    current.emplace_back(form);
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

void write_tagged(std::ostream& out, const std::vector<std::vector<std::string>>& forms,
                  const std::vector<std::vector<std::string>>& tags) {
  if (forms.size() != tags.size()) throw AlignmentError("forms and tags differ in sentence count");
  for (std::size_t s = 0; s < forms.size(); ++s) {
    if (forms[s].size() != tags[s].size()) {
      throw AlignmentError("sentence " + std::to_string(s + 1) + ": forms and tags differ in length");
    }
    if (s > 0) out << '\n';
    for (std::size_t t = 0; t < forms[s].size(); ++t) out << forms[s][t] << '\t' << tags[s][t] << '\n';
  }
}

void write_corpus(std::ostream& out, const TaggedCorpus& corpus) {
  bool first = true;
  for (const auto& s : corpus.sentences()) {
    if (!first) out << '\n';
    first = false;
    for (const auto& t : s.tokens) out << t.form << '\t' << t.gold.raw() << '\n';
  }
}

std::pair<TaggedCorpus, TaggedCorpus> folds_split(const TaggedCorpus& corpus, int test_fold) {
  if (test_fold < 0 || test_fold >= corpus.num_folds()) {
    throw BadFoldId("fold " + std::to_string(test_fold) + " outside [0, " +
                    std::to_string(corpus.num_folds()) + ")");
  }
  std::vector<Sentence> train, test;
  std::vector<int> train_folds, test_folds;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const int f = corpus.fold_of(i);
    if (f == test_fold) {
      test.push_back(corpus.sentence(i));
      test_folds.push_back(f);
    } else {
      train.push_back(corpus.sentence(i));
      train_folds.push_back(f);
    }
  }
  if (test.empty()) throw BadFoldId("fold " + std::to_string(test_fold) + " is empty");
  if (train.empty()) throw EmptyCorpus("no training sentences outside fold " + std::to_string(test_fold));
  return {TaggedCorpus(std::move(train), std::move(train_folds), corpus.num_folds(), corpus.inventory()),
          TaggedCorpus(std::move(test), std::move(test_folds), corpus.num_folds(), corpus.inventory())};
}

TaggedCorpus augment_training(const TaggedCorpus& base, const TaggedCorpus& extra) {
  std::set<std::string> base_tags;
  if (!base.inventory()) {
    for (const auto& s : base.sentences())
      for (const auto& t : s.tokens) base_tags.insert(t.gold.raw());
  }
  auto known = [&](const std::string& tag) {
    return base.inventory() ? base.inventory()->contains(tag) : base_tags.count(tag) > 0;
  };
  for (const auto& s : extra.sentences()) {
    for (const auto& t : s.tokens) {
      if (!known(t.gold.raw())) {
        throw InventoryMismatch("augmenting corpus uses tag '" + t.gold.raw() +
                                "' outside the base inventory");
      }
    }
  }
  std::vector<Sentence> sentences = base.sentences();
  std::vector<int> folds = base.folds();
  sentences.insert(sentences.end(), extra.sentences().begin(), extra.sentences().end());
  folds.insert(folds.end(), extra.size(), kNeverTest);
  return TaggedCorpus(std::move(sentences), std::move(folds), base.num_folds(), base.inventory());
}

TaggedCorpus project_to_coarse(const TaggedCorpus& corpus) {
  std::vector<Sentence> sentences = corpus.sentences();
  for (auto& s : sentences)
    for (auto& t : s.tokens) t.gold = MnemonicTag(t.gold.category_string());
  std::shared_ptr<const TagInventory> inventory;
  if (corpus.inventory()) {
    inventory = std::make_shared<const TagInventory>(
        CoarseInventory::build(*corpus.inventory()).as_tag_inventory());
  }
  return TaggedCorpus(std::move(sentences), corpus.folds(), corpus.num_folds(), std::move(inventory));
}

Vocabulary Vocabulary::build(const TaggedCorpus& train) {
  std::set<std::string> words;
  std::set<char32_t> chars;
  for (const auto& s : train.sentences()) {
    for (const auto& t : s.tokens) {
      words.insert(t.form);
      for (char32_t c : utf8::decode(t.form)) chars.insert(c);
    }
  }
  return from_items(std::vector<std::string>(words.begin(), words.end()),
                    std::u32string(chars.begin(), chars.end()));
}

Vocabulary Vocabulary::from_items(std::vector<std::string> words, std::u32string chars) {
  Vocabulary v;
  v.words_ = std::move(words);
  v.chars_ = std::move(chars);
  v.reindex();
  return v;
}

void Vocabulary::reindex() {
  word_index_.clear();
  char_index_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i) word_index_.emplace(words_[i], kReservedWords + i);
  for (std::size_t i = 0; i < chars_.size(); ++i) char_index_.emplace(chars_[i], kReservedChars + i);
}

std::size_t Vocabulary::word_id(std::string_view form) const {
  auto it = word_index_.find(std::string(form));
  return it == word_index_.end() ? kUnknownWord : it->second;
}

std::size_t Vocabulary::char_id(char32_t c) const {
  auto it = char_index_.find(c);
  return it == char_index_.end() ? kUnknownChar : it->second;
}

bool Vocabulary::contains_word(std::string_view form) const {
  return word_index_.count(std::string(form)) > 0;
}

}  // namespace morphtag
