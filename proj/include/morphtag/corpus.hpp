#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "morphtag/tagset.hpp"

namespace morphtag {

struct Token {
  std::string form;
  MnemonicTag gold;
};

struct Sentence {
  std::vector<Token> tokens;
  std::size_t first_line = 0;  // 1-based line in the source file, 0 if synthetic

  std::vector<std::string> forms() const;
};

// Marks sentences (from an augmenting corpus) that never land in a test fold.
inline constexpr int kNeverTest = -1;

struct RoundRobinFolds {
  int k = 10;
};
struct FoldFile {
  std::filesystem::path path;
};
using FoldSource = std::variant<RoundRobinFolds, FoldFile>;

class TaggedCorpus {
 public:
  TaggedCorpus() = default;
  /// fold_of[i] in [0, num_folds) or kNeverTest. Throws EmptyCorpus if
  /// `sentences` is empty and BadFoldId on inconsistent fold ids.
  TaggedCorpus(std::vector<Sentence> sentences, std::vector<int> fold_of, int num_folds,
               std::shared_ptr<const TagInventory> inventory = nullptr);

  const std::vector<Sentence>& sentences() const { return sentences_; }
  const Sentence& sentence(std::size_t i) const { return sentences_.at(i); }
  std::size_t size() const { return sentences_.size(); }
  std::size_t token_count() const;

  int fold_of(std::size_t sentence) const { return fold_of_.at(sentence); }
  const std::vector<int>& folds() const { return fold_of_; }
  int num_folds() const { return num_folds_; }

  const std::shared_ptr<const TagInventory>& inventory() const { return inventory_; }

 private:
  std::vector<Sentence> sentences_;
  std::vector<int> fold_of_;
  int num_folds_ = 1;
  std::shared_ptr<const TagInventory> inventory_;
};

/// Reads `<form>\t<tag>` lines with blank lines between sentences. When
/// `inventory` is given every tag must belong to it (UnknownTag otherwise).
std::vector<Sentence> read_sentences(std::istream& in, const TagInventory* inventory = nullptr);

TaggedCorpus load_corpus(const std::filesystem::path& path, const FoldSource& folds,
                         std::shared_ptr<const TagInventory> inventory = nullptr);
TaggedCorpus load_corpus(std::istream& in, const FoldSource& folds,
                         std::shared_ptr<const TagInventory> inventory = nullptr);

/// Round-robin assignment: sentence i goes to fold i mod k.
std::vector<int> round_robin_folds(std::size_t sentences, int k);
std::vector<int> read_fold_file(const std::filesystem::path& path);

/// Pre-tokenized input for tagging: one form per line, blank line between
/// sentences. Returns an empty list for an empty file.
std::vector<std::vector<std::string>> read_forms(std::istream& in);

void write_tagged(std::ostream& out, const std::vector<std::vector<std::string>>& forms,
                  const std::vector<std::vector<std::string>>& tags);
void write_corpus(std::ostream& out, const TaggedCorpus& corpus);

/// Returns (train, test). Sentences marked kNeverTest always go to train.
std::pair<TaggedCorpus, TaggedCorpus> folds_split(const TaggedCorpus& corpus, int test_fold);

/// Concatenates; sentences from `extra` are marked kNeverTest. Every tag in
/// `extra` must belong to base's inventory (or, lacking one, to base's tag
/// set). Throws InventoryMismatch.
TaggedCorpus augment_training(const TaggedCorpus& base, const TaggedCorpus& extra);

/// Replaces every gold tag by its single-character lexical category.
TaggedCorpus project_to_coarse(const TaggedCorpus& corpus);

// Word and character indices. Reserved ids come first.
class Vocabulary {
 public:
  static constexpr std::size_t kUnknownWord = 0;
  static constexpr std::size_t kUnknownChar = 0;
  static constexpr std::size_t kWordStart = 1;
  static constexpr std::size_t kWordEnd = 2;
  static constexpr std::size_t kReservedWords = 1;
  static constexpr std::size_t kReservedChars = 3;

  Vocabulary() = default;

  /// Words and characters are sorted so the mapping is independent of
  /// sentence order.
  static Vocabulary build(const TaggedCorpus& train);
  /// Rebuilds from observed items in index order (reserved ids excluded).
  static Vocabulary from_items(std::vector<std::string> words, std::u32string chars);

  std::size_t word_id(std::string_view form) const;
  std::size_t char_id(char32_t c) const;
  bool contains_word(std::string_view form) const;

  std::size_t word_count() const { return kReservedWords + words_.size(); }
  std::size_t char_count() const { return kReservedChars + chars_.size(); }

  const std::vector<std::string>& words() const { return words_; }
  const std::u32string& chars() const { return chars_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.chars_ == b.chars_;
  }

 private:
  void reindex();

  std::vector<std::string> words_;
  std::u32string chars_;
  std::unordered_map<std::string, std::size_t> word_index_;
  std::unordered_map<char32_t, std::size_t> char_index_;
};

}  // namespace morphtag
