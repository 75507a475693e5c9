#include "morphtag/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "morphtag/errors.hpp"
#include "morphtag/utf8.hpp"

namespace morphtag {

namespace {

double ratio(std::size_t a, std::size_t b) { return static_cast<double>(a) / static_cast<double>(b); }

std::string sentence_ref(const Sentence& s, std::size_t index) {
  std::string ref = "sentence " + std::to_string(index + 1);
  if (s.first_line) ref += " (gold line " + std::to_string(s.first_line) + ")";
  return ref;
}

std::optional<char32_t> first_code_point(const std::string& tag) {
  if (tag.empty()) return std::nullopt;
  try {
    return utf8::decode(tag).front();
  } catch (const InvalidUtf8&) {
    return std::nullopt;
  }
}

std::string percent(double fraction) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << fraction * 100.0;
  return os.str();
}

// Called once the shared prefix of sentences is known to align.
void check_sentence_counts(std::size_t predicted, const TaggedCorpus& gold) {
  if (predicted < gold.size()) {
    throw AlignmentError(sentence_ref(gold.sentence(predicted), predicted) + ": missing from the predictions (" +
                         std::to_string(predicted) + " predicted sentences, gold has " + std::to_string(gold.size()) +
                         ")");
  }
  if (predicted > gold.size()) {
    throw AlignmentError("sentence " + std::to_string(gold.size() + 1) + ": predictions continue past the " +
                         std::to_string(gold.size()) + " gold sentences");
  }
}

}  // namespace

double EvalReport::accuracy() const { return total_tokens ? ratio(correct_tokens, total_tokens) : 0.0; }

std::optional<double> EvalReport::known_accuracy() const {
  if (known_count == 0) return std::nullopt;
  return ratio(known_correct, known_count);
}

std::optional<double> EvalReport::unknown_accuracy() const {
  if (unknown_count == 0) return std::nullopt;
  return ratio(unknown_correct, unknown_count);
}

double EvalReport::coarse_accuracy() const { return total_tokens ? ratio(coarse_correct, total_tokens) : 0.0; }

EvalReport& EvalReport::operator+=(const EvalReport& o) {
  total_tokens += o.total_tokens;
  correct_tokens += o.correct_tokens;
  known_count += o.known_count;
  known_correct += o.known_correct;
  unknown_count += o.unknown_count;
  unknown_correct += o.unknown_correct;
  coarse_correct += o.coarse_correct;
  for (const auto& [pair, count] : o.confusion) confusion[pair] += count;
  return *this;
}

EvalReport evaluate(const TagSequences& predicted, const TaggedCorpus& gold, const Vocabulary& vocab,
                    const MorphLexicon* lexicon) {
  const std::size_t shared = std::min(predicted.size(), gold.size());
  for (std::size_t s = 0; s < shared; ++s) {
    const Sentence& sentence = gold.sentence(s);
    if (predicted[s].size() != sentence.tokens.size()) {
      throw AlignmentError(sentence_ref(sentence, s) + ": " + std::to_string(predicted[s].size()) +
                           " predicted tags for " + std::to_string(sentence.tokens.size()) + " tokens");
    }
  }
  check_sentence_counts(predicted.size(), gold);

  EvalReport r;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const Sentence& sentence = gold.sentence(s);
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
      const Token& token = sentence.tokens[t];
      const std::string& pred = predicted[s][t];
      const bool correct = pred == token.gold.raw();
      const bool known = vocab.contains_word(token.form) || (lexicon != nullptr && lexicon->contains(token.form));
      ++r.total_tokens;
      r.correct_tokens += correct;
      if (known) {
        ++r.known_count;
        r.known_correct += correct;
      } else {
        ++r.unknown_count;
        r.unknown_correct += correct;
      }
      if (first_code_point(pred) == token.gold.category()) ++r.coarse_correct;
      if (!correct) ++r.confusion[{pred, token.gold.raw()}];
    }
  }
  return r;
}

EvalReport evaluate(const TaggedCorpus& predicted_corpus, const TaggedCorpus& gold, const Vocabulary& vocab,
                    const MorphLexicon* lexicon) {
  const std::size_t shared = std::min(predicted_corpus.size(), gold.size());
  TagSequences tags(shared);
  for (std::size_t s = 0; s < shared; ++s) {
    const Sentence& p = predicted_corpus.sentence(s);
    const Sentence& g = gold.sentence(s);
    if (p.tokens.size() != g.tokens.size()) {
      throw AlignmentError(sentence_ref(g, s) + ": prediction has " + std::to_string(p.tokens.size()) +
                           " tokens, gold has " + std::to_string(g.tokens.size()));
    }
    for (std::size_t t = 0; t < p.tokens.size(); ++t) {
      if (p.tokens[t].form != g.tokens[t].form) {
        throw AlignmentError(sentence_ref(g, s) + ": token " + std::to_string(t + 1) + " is '" + p.tokens[t].form +
                             "' in the prediction but '" + g.tokens[t].form + "' in gold");
      }
      tags[s].push_back(p.tokens[t].gold.raw());
    }
  }
  check_sentence_counts(predicted_corpus.size(), gold);
  return evaluate(tags, gold, vocab, lexicon);
}

double error_reduction(double baseline_percent, double new_percent) {
  if (baseline_percent < 0.0 || baseline_percent > 100.0 || new_percent < 0.0 || new_percent > 100.0) {
    throw ConfigError("accuracies must lie in [0, 100]");
  }
  if (baseline_percent == 100.0) throw DegenerateBaseline("baseline accuracy of 100% leaves no errors to reduce");
  return (new_percent - baseline_percent) / (100.0 - baseline_percent) * 100.0;
}

std::vector<ConfusionShare> top_confusions(const EvalReport& report, std::size_t k) {
  std::vector<ConfusionShare> all;
  const std::size_t errors = report.errors();
  if (errors == 0) return all;
  for (const auto& [pair, count] : report.confusion) {
    all.push_back({pair.first, pair.second, count, 100.0 * ratio(count, errors)});
  }
  std::sort(all.begin(), all.end(), [](const ConfusionShare& a, const ConfusionShare& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.label() < b.label();
  });
  if (all.size() > k) all.resize(k);
  return all;
}

void write_report_text(std::ostream& out, const EvalReport& report, std::optional<double> baseline_percent,
                       std::size_t top_k) {
  auto opt = [](std::optional<double> v) { return v ? percent(*v) : std::string("n/a"); };
  out << "tokens        " << report.total_tokens << '\n'
      << "accuracy      " << percent(report.accuracy()) << '\n'
      << "known         " << opt(report.known_accuracy()) << "  (" << report.known_count << " tokens)\n"
      << "unknown       " << opt(report.unknown_accuracy()) << "  (" << report.unknown_count << " tokens)\n"
      << "category      " << percent(report.coarse_accuracy()) << '\n';
  if (baseline_percent) {
    std::ostringstream er;
    er << std::fixed << std::setprecision(1) << error_reduction(*baseline_percent, report.accuracy() * 100.0);
    out << "error reduction vs " << *baseline_percent << ": " << er.str() << "%\n";
  }
  const auto top = top_confusions(report, top_k);
  if (!top.empty()) {
    out << "\nmost frequent errors (predicted>gold, share of errors)\n";
    for (std::size_t i = 0; i < top.size(); ++i) {
      out << std::setw(3) << i + 1 << ". " << std::left << std::setw(20) << top[i].label() << std::right
          << std::fixed << std::setprecision(2) << top[i].share << "%  (" << top[i].count << ")\n";
    }
  }
}

void write_report_kv(std::ostream& out, const EvalReport& report, std::optional<double> baseline_percent) {
  out << std::setprecision(17);
  out << "total_tokens=" << report.total_tokens << '\n'
      << "correct_tokens=" << report.correct_tokens << '\n'
      << "accuracy=" << report.accuracy() * 100.0 << '\n';
  if (auto k = report.known_accuracy()) out << "known_acc=" << *k * 100.0 << '\n';
  if (auto u = report.unknown_accuracy()) out << "unknown_acc=" << *u * 100.0 << '\n';
  out << "known_count=" << report.known_count << '\n'
      << "unknown_count=" << report.unknown_count << '\n'
      << "coarse_acc=" << report.coarse_accuracy() * 100.0 << '\n';
  if (baseline_percent) {
    out << "error_reduction=" << error_reduction(*baseline_percent, report.accuracy() * 100.0) << '\n';
  }
  for (const auto& [pair, count] : report.confusion) {
    out << "confusion." << pair.first << '.' << pair.second << '=' << count << '\n';
  }
}

std::map<std::string, std::string> read_kv(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = std::string(utf8::trim_right(line.substr(eq + 1)));
  }
  return kv;
}

std::uint64_t fold_seed(std::uint64_t seed, int fold) { return seed + static_cast<std::uint64_t>(fold); }

CrossValidationSummary cross_validate(const TaggedCorpus& corpus, const TagInventory& fine, const ModelConfig& config,
                                      std::shared_ptr<const MorphLexicon> lexicon, const XvalOptions& options) {
  const int k = corpus.num_folds();
  if (k < 2) throw BadFoldId("cross-validation needs at least two folds");

  CrossValidationSummary summary;
  summary.folds.resize(static_cast<std::size_t>(k));
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (int fold = next++; fold < k; fold = next++) {
      try {
        auto [train_split, test_split] = folds_split(corpus, fold);
        if (options.extra) train_split = augment_training(train_split, *options.extra);
        ModelConfig cfg = config;
        cfg.seed = fold_seed(config.seed, fold);
        TrainOptions train_opts;
        if (options.on_epoch) {
          train_opts.on_epoch = [&, fold](const EpochStats& s) {
            std::lock_guard lock(mu);
            options.on_epoch(fold, s);
          };
        }
        TrainResult result = train_model(cfg, train_split, fine, lexicon, train_opts);
        TagSequences predicted;
        predicted.reserve(test_split.size());
        for (const Sentence& s : test_split.sentences()) {
          std::vector<std::string> tags;
          for (const auto& t : result.model.tag_sentence(s.forms())) tags.push_back(t.raw());
          predicted.push_back(std::move(tags));
        }
        const MorphLexicon* lex = uses_lexicon(cfg.mode) ? lexicon.get() : nullptr;
        FoldResult fr{fold, cfg.seed, evaluate(predicted, test_split, result.model.vocab(), lex),
                      std::move(result.trace)};
        summary.folds[static_cast<std::size_t>(fold)] = std::move(fr);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = k;
      }
    }
  };

  const int jobs = std::clamp(options.jobs, 1, k);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& f : summary.folds) summary.pooled += f.report;
  summary.mean_accuracy = summary.pooled.accuracy();
  double mean_of_folds = 0.0;
  for (const auto& f : summary.folds) mean_of_folds += f.report.accuracy();
  mean_of_folds /= k;
  double var = 0.0;
  for (const auto& f : summary.folds) var += (f.report.accuracy() - mean_of_folds) * (f.report.accuracy() - mean_of_folds);
  summary.stddev_accuracy = std::sqrt(var / k);
  return summary;
}

}  // namespace morphtag
