#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace morphtag {

class TaggedCorpus;
class Vocabulary;

// Closed set of lexicon feature labels. File order defines the indices.
class LabelInventory {
 public:
  LabelInventory() = default;
  /// Rejects empty and duplicate labels (MalformedLexiconLine).
  explicit LabelInventory(std::vector<std::string> labels);

  static LabelInventory read(std::istream& in);
  static LabelInventory load(const std::filesystem::path& path);

  std::size_t size() const { return labels_.size(); }
  const std::string& at(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> find(std::string_view label) const;

  friend bool operator==(const LabelInventory& a, const LabelInventory& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LexiconOptions {
  // Retry a missing form in lower case (sentence-initial capitals).
  bool lowercase_fallback = true;
};

// Word form -> set of label indices, compiled to n-hot vectors on lookup.
class MorphLexicon {
 public:
  using LabelSet = std::vector<std::uint32_t>;  // sorted, unique

  MorphLexicon() = default;
  explicit MorphLexicon(LabelInventory labels, LexiconOptions options = {});

  /// Unions `labels` into the entry for `form`. Throws UnknownLabel.
  void add(std::string_view form, std::span<const std::string> labels);
  /// Parses one `<form>\t<label>;<label>;...` line and merges it.
  void add_line(std::string_view line, std::size_t lineno = 0);
  void merge(const MorphLexicon& other);

  const LabelInventory& labels() const { return labels_; }
  const LexiconOptions& options() const { return options_; }
  std::size_t size() const { return entries_.size(); }

  /// Entry for `form`, honoring the lower-case fallback. Null if absent.
  const LabelSet* lookup(std::string_view form) const;
  bool contains(std::string_view form) const { return lookup(form) != nullptr; }

  /// Length |labels|, entries in {0,1}. All zeros for out-of-lexicon forms.
  std::vector<double> encode_nhot(std::string_view form) const;

  friend bool operator==(const MorphLexicon& a, const MorphLexicon& b) {
    return a.labels_ == b.labels_ && a.entries_ == b.entries_;
  }

 private:
  LabelInventory labels_;
  LexiconOptions options_;
  std::unordered_map<std::string, LabelSet> entries_;
};

MorphLexicon read_lexicon(std::istream& in, LabelInventory labels, LexiconOptions options = {});
MorphLexicon load_lexicon(const std::filesystem::path& path, LabelInventory labels,
                          LexiconOptions options = {});

std::vector<double> encode_nhot(const MorphLexicon& lexicon, std::string_view form);

struct CoverageReport {
  std::size_t tokens = 0;
  std::size_t in_vocab = 0;
  std::size_t lexicon_only = 0;
  std::size_t unknown = 0;

  double in_vocab_fraction() const;
  double lexicon_only_fraction() const;
  double unknown_fraction() const;
};

/// Splits the corpus tokens into in-training-vocabulary, lexicon-only and
/// unknown (neither).
CoverageReport coverage(const MorphLexicon& lexicon, const TaggedCorpus& corpus, const Vocabulary& vocab);

}  // namespace morphtag
