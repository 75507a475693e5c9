#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "morphtag/errors.hpp"
#include "morphtag/eval.hpp"
#include "synthetic.hpp"

using namespace morphtag;

namespace {

TaggedCorpus gold_corpus() {
  std::istringstream in(
      "Hestur\tnken\n"
      "hleypur\tsfg3en\n"
      "\n"
      "hratt\taa\n"
      "heim\taa\n");
  return load_corpus(in, RoundRobinFolds{1});
}

Vocabulary train_vocab() {
  std::istringstream in("Hestur\tnken\nhratt\taa\n");
  return Vocabulary::build(load_corpus(in, RoundRobinFolds{1}));
}

EvalReport report_with(std::map<std::pair<std::string, std::string>, std::size_t> confusion, std::size_t correct) {
  EvalReport r;
  r.confusion = std::move(confusion);
  std::size_t errors = 0;
  for (const auto& [pair, n] : r.confusion) errors += n;
  r.correct_tokens = correct;
  r.total_tokens = correct + errors;
  return r;
}

}  // namespace

TEST_CASE("three of four correct") {
  const auto r = evaluate({{"nken", "sfg3en"}, {"aa", "ao"}}, gold_corpus(), train_vocab());
  CHECK(r.total_tokens == 4);
  CHECK(r.correct_tokens == 3);
  CHECK(r.accuracy() == 0.75);
  CHECK(r.known_count == 2);
  CHECK(r.unknown_count == 2);
  CHECK(r.known_count + r.unknown_count == r.total_tokens);
  CHECK(r.known_correct + r.unknown_correct == r.correct_tokens);
  CHECK(*r.unknown_accuracy() == 0.5);
  CHECK(r.coarse_accuracy() == 1.0);
  CHECK(r.confusion.at({"ao", "aa"}) == 1);
}

TEST_CASE("lexicon forms count as known") {
  MorphLexicon lex(LabelInventory({"so", "ao"}));
  lex.add("hleypur", std::vector<std::string>{"so"});
  lex.add("heim", std::vector<std::string>{"ao"});
  const auto r = evaluate({{"nken", "sfg3en"}, {"aa", "aa"}}, gold_corpus(), train_vocab(), &lex);
  CHECK(r.unknown_count == 0);
  CHECK_FALSE(r.unknown_accuracy().has_value());
  CHECK(*r.known_accuracy() == 1.0);

  std::ostringstream kv;
  write_report_kv(kv, r);
  CHECK(kv.str().find("unknown_acc") == std::string::npos);
  CHECK(kv.str().find("unknown_count=0") != std::string::npos);
}

TEST_CASE("predictions outside the inventory count as misses") {
  const auto r = evaluate({{"zzz", "sfg3en"}, {"aa", "aa"}}, gold_corpus(), train_vocab());
  CHECK(r.correct_tokens == 3);
  CHECK(r.confusion.at({"zzz", "nken"}) == 1);
}

TEST_CASE("misaligned predictions name the sentence") {
  try {
    evaluate({{"nken", "sfg3en"}, {"aa"}}, gold_corpus(), train_vocab());
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    const std::string what = e.what();
    CHECK(what.find("sentence 2") != std::string::npos);
    CHECK(what.find("line 4") != std::string::npos);
  }
  CHECK_THROWS_AS(evaluate({{"nken", "sfg3en"}}, gold_corpus(), train_vocab()), AlignmentError);
}

TEST_CASE("evaluating a predicted corpus checks forms") {
  const auto gold = gold_corpus();
  const auto r = evaluate(gold, gold, train_vocab());
  CHECK(r.accuracy() == 1.0);
  CHECK(top_confusions(r, 10).empty());

  std::istringstream in("Hestur\tnken\nhleypur\tsfg3en\n\nhratt\taa\nburt\taa\n");
  const auto other = load_corpus(in, RoundRobinFolds{1});
  CHECK_THROWS_AS(evaluate(other, gold, train_vocab()), AlignmentError);
}

TEST_CASE("error reduction") {
  CHECK(error_reduction(93.84, 95.15) == doctest::Approx(21.27).epsilon(1e-3));
  CHECK(std::abs(error_reduction(93.84, 95.15) - 21.3) <= 0.05);
  CHECK(error_reduction(90, 90) == 0.0);
  CHECK(error_reduction(50, 100) == 100.0);
  CHECK_THROWS_AS(error_reduction(100, 100), DegenerateBaseline);
  double previous = -1e9;
  for (double acc = 80.0; acc <= 100.0; acc += 0.5) {
    const double er = error_reduction(93.84, acc);
    CHECK(er > previous);
    previous = er;
  }
}

TEST_CASE("confusions rank by count then label") {
  const auto r = report_with({{{"a", "b"}, 3}, {{"c", "d"}, 1}}, 10);
  const auto top = top_confusions(r, 10);
  REQUIRE(top.size() == 2);
  CHECK(top[0].label() == "a>b");
  CHECK(top[0].share == doctest::Approx(75.0));
  CHECK(top[1].label() == "c>d");
  CHECK(top[1].share == doctest::Approx(25.0));

  const auto tied = report_with({{{"sng", "sfg3fn"}, 2}, {{"aþ", "ao"}, 2}, {{"c", "ct"}, 2}, {{"x", "e"}, 1}}, 0);
  const auto ranked = top_confusions(tied, 3);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].label() == "aþ>ao");
  CHECK(ranked[1].label() == "c>ct");
  CHECK(ranked[2].label() == "sng>sfg3fn");

  const auto all = top_confusions(tied, 100);
  const double total = std::accumulate(all.begin(), all.end(), 0.0, [](double s, const auto& c) { return s + c.share; });
  CHECK(std::abs(total - 100.0) <= 1e-9);
}

TEST_CASE("evaluate is pure") {
  const TagSequences pred{{"nken", "sng"}, {"aa", "ao"}};
  CHECK(evaluate(pred, gold_corpus(), train_vocab()) == evaluate(pred, gold_corpus(), train_vocab()));
}

TEST_CASE("reports write and read back") {
  const auto r = evaluate({{"nken", "sng"}, {"aa", "ao"}}, gold_corpus(), train_vocab());
  std::ostringstream kv;
  write_report_kv(kv, r, 93.84);
  std::istringstream back(kv.str());
  const auto map = read_kv(back);
  CHECK(std::stod(map.at("accuracy")) == doctest::Approx(50.0));
  CHECK(map.at("unknown_count") == "2");
  CHECK(map.at("confusion.sng.sfg3en") == "1");
  CHECK(map.count("error_reduction") == 1);

  std::ostringstream text;
  write_report_text(text, r, 93.84);
  CHECK(text.str().find("sng>sfg3en") != std::string::npos);
}

TEST_CASE("cross-validation partitions and pools") {
  std::shared_ptr<const TagInventory> inv;
  const auto corpus = testing::make_corpus(20, 5, 4, &inv);
  const auto config = testing::small_config(Mode::Baseline, 2, 9);
  const auto summary = cross_validate(corpus, *inv, config, nullptr);
  REQUIRE(summary.folds.size() == 4);
  std::size_t tokens = 0, correct = 0;
  for (const auto& f : summary.folds) {
    CHECK(f.seed == fold_seed(9, f.fold));
    tokens += f.report.total_tokens;
    correct += f.report.correct_tokens;
  }
  CHECK(tokens == corpus.token_count());
  CHECK(std::abs(summary.mean_accuracy - static_cast<double>(correct) / static_cast<double>(tokens)) <= 1e-12);

  XvalOptions parallel;
  parallel.jobs = 3;
  const auto again = cross_validate(corpus, *inv, config, nullptr, parallel);
  for (std::size_t i = 0; i < 4; ++i) CHECK(again.folds[i].report == summary.folds[i].report);

  const auto one_fold = testing::make_corpus(4, 5, 1);
  CHECK_THROWS_AS(cross_validate(one_fold, *inv, config, nullptr), BadFoldId);
}

TEST_CASE("two folds over four sentences") {
  std::shared_ptr<const TagInventory> inv;
  const auto corpus = testing::make_corpus(4, 6, 2, &inv);
  const auto summary = cross_validate(corpus, *inv, testing::small_config(Mode::Baseline, 1), nullptr);
  CHECK(summary.folds.size() == 2);
}
