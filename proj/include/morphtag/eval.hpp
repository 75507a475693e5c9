#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "morphtag/corpus.hpp"
#include "morphtag/lexicon.hpp"
#include "morphtag/tagger.hpp"

namespace morphtag {

struct EvalReport {
  std::size_t total_tokens = 0;
  std::size_t correct_tokens = 0;
  std::size_t known_count = 0;
  std::size_t known_correct = 0;
  std::size_t unknown_count = 0;
  std::size_t unknown_correct = 0;
  std::size_t coarse_correct = 0;  // first character matches
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;  // (predicted, gold) -> count

  double accuracy() const;
  /// Absent when the partition is empty.
  std::optional<double> known_accuracy() const;
  std::optional<double> unknown_accuracy() const;
  double coarse_accuracy() const;
  std::size_t errors() const { return total_tokens - correct_tokens; }

  EvalReport& operator+=(const EvalReport& other);
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

using TagSequences = std::vector<std::vector<std::string>>;

/// Exact fine-tag match. A token is known when its form is in `vocab` or,
/// with a lexicon, in the lexicon. Throws AlignmentError.
EvalReport evaluate(const TagSequences& predicted, const TaggedCorpus& gold, const Vocabulary& vocab,
                    const MorphLexicon* lexicon = nullptr);

/// Forms of `predicted_corpus` must match the gold forms as well.
EvalReport evaluate(const TaggedCorpus& predicted_corpus, const TaggedCorpus& gold, const Vocabulary& vocab,
                    const MorphLexicon* lexicon = nullptr);

/// Relative error reduction in percent: (new - base) / (100 - base) * 100.
/// Throws DegenerateBaseline when base is 100.
double error_reduction(double baseline_percent, double new_percent);

struct ConfusionShare {
  std::string predicted;
  std::string gold;
  std::size_t count = 0;
  double share = 0.0;  // percent of all errors

  std::string label() const { return predicted + ">" + gold; }
};

/// Descending count, ties by "pred>gold" string.
std::vector<ConfusionShare> top_confusions(const EvalReport& report, std::size_t k);

void write_report_text(std::ostream& out, const EvalReport& report, std::optional<double> baseline_percent = {},
                       std::size_t top_k = 10);
/// Flat key=value lines: accuracy, known_acc, unknown_acc (omitted when
/// absent), unknown_count, ... and confusion.<pred>.<gold>=<count>.
void write_report_kv(std::ostream& out, const EvalReport& report, std::optional<double> baseline_percent = {});
std::map<std::string, std::string> read_kv(std::istream& in);

struct FoldResult {
  int fold = 0;
  std::uint64_t seed = 0;
  EvalReport report;
  TrainTrace trace;
};

struct CrossValidationSummary {
  std::vector<FoldResult> folds;
  EvalReport pooled;          // sum over folds
  double mean_accuracy = 0;   // token-weighted
  double stddev_accuracy = 0; // across fold accuracies
};

struct XvalOptions {
  int jobs = 1;
  const TaggedCorpus* extra = nullptr;  // added to every training split
  std::function<void(int fold, const EpochStats&)> on_epoch;
};

/// Seed of the model trained with `fold` held out.
std::uint64_t fold_seed(std::uint64_t seed, int fold);

/// Trains one model per fold (seed + fold) and tests it on that fold.
/// Requires at least two folds.
CrossValidationSummary cross_validate(const TaggedCorpus& corpus, const TagInventory& fine, const ModelConfig& config,
                                      std::shared_ptr<const MorphLexicon> lexicon, const XvalOptions& options = {});

}  // namespace morphtag
