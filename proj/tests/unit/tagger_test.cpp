#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "morphtag/errors.hpp"
#include "morphtag/tagger.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace morphtag;
using namespace morphtag::testing;

namespace {

struct DefaultSetup {
  TagInventory tags = load_tagset(MORPHTAG_SOURCE_DIR "/data/synthetic_tagset.txt");
  LabelInventory labels;
  std::shared_ptr<MorphLexicon> lexicon;
  Vocabulary vocab = Vocabulary::from_items({"hestur"}, U"ehrstu");

  DefaultSetup() {
    std::vector<std::string> names;
    for (int i = 0; i < 61; ++i) names.push_back("f" + std::to_string(i));
    labels = LabelInventory(names);
    lexicon = std::make_shared<MorphLexicon>(labels);
    lexicon->add("hestur", std::vector<std::string>{"f0", "f3"});
  }

  TaggerModel model(Mode mode) const {
    ModelConfig c;
    c.mode = mode;
    TaggerModel m(fit_dimensions(c, tags, &labels), tags, vocab, uses_lexicon(mode) ? std::optional(labels) : std::nullopt);
    if (uses_lexicon(mode)) m.attach_lexicon(lexicon);
    return m;
  }
};

GradCheckResult check_gradients(GradCheckSetup& s) {
  auto& store = s.model->parameters();
  store.zero_grads();
  {
    Graph g(store);
    g.backward(s.model->sentence_loss(g, s.forms, s.gold, s.hints));
  }
  return finite_difference_check(
      store,
      [&] {
        Graph g(std::as_const(store));
        return g.scalar(s.model->sentence_loss(g, s.forms, s.gold, s.hints));
      },
      1e-5, 1e-4);
}

TaggedCorpus single_sentence() {
  std::istringstream in("Hestur\tnken\nhleypur\tsfg3en\nhratt\taa\n.\tp\n");
  return load_corpus(in, RoundRobinFolds{1});
}

}  // namespace

TEST_CASE("mode names") {
  CHECK(mode_name(Mode::WithLexicon) == "dmii");
  CHECK(parse_mode("lc") == Mode::WithLexiconAndCoarse);
  CHECK(parse_mode("baseline") == Mode::Baseline);
  CHECK_THROWS_AS(parse_mode("full"), ConfigError);
}

TEST_CASE("token encodings have the widths of the three modes") {
  const DefaultSetup defaults;
  CHECK(defaults.tags.size() == 565);
  const std::pair<Mode, std::size_t> expected[] = {
      {Mode::Baseline, 168}, {Mode::WithLexicon, 229}, {Mode::WithLexiconAndCoarse, 239}};
  for (const auto& [mode, width] : expected) {
    const auto model = defaults.model(mode);
    CHECK(model.config().token_input_width() == width);
    Graph g(model.parameters());
    const auto hint = mode == Mode::WithLexiconAndCoarse ? std::optional<std::size_t>(0) : std::nullopt;
    CHECK(g.dim(model.encode_token(g, "hestur", hint)) == width);
    CHECK(g.dim(model.encode_token(g, "óþekkt", hint)) == width);
  }
}

TEST_CASE("hints and lexicons are checked per mode") {
  const DefaultSetup defaults;
  const auto lc = defaults.model(Mode::WithLexiconAndCoarse);
  Graph g(lc.parameters());
  CHECK_THROWS_AS(lc.encode_token(g, "hestur", std::nullopt), MissingCoarseHint);
  CHECK_THROWS_AS(lc.encode_token(g, "hestur", 10), BadClassIndex);
  const auto base = defaults.model(Mode::Baseline);
  CHECK_THROWS_AS(base.encode_token(g, "hestur", 0), UnexpectedCoarseHint);

  ModelConfig c = fit_dimensions(ModelConfig{}, defaults.tags, &defaults.labels);
  c.mode = Mode::WithLexicon;
  const TaggerModel bare(c, defaults.tags, defaults.vocab, defaults.labels);
  Graph h(bare.parameters());
  CHECK_THROWS_AS(bare.encode_token(h, "hestur", std::nullopt), MissingLexicon);

  c.lexicon_dim = 60;
  CHECK_THROWS_AS(TaggerModel(c, defaults.tags, defaults.vocab, defaults.labels), ConfigError);
}

TEST_CASE("zeroed output layer ties every tag and picks the first") {
  const auto corpus = single_sentence();
  const auto inv = TagInventory::build(std::vector<std::string>{"nken", "aa", "p", "sfg3en"});
  TaggerModel m(small_config(Mode::Baseline, 1), inv, Vocabulary::build(corpus), std::nullopt);
  for (auto name : {"out.w", "out.b"}) m.parameters().at(*m.parameters().find(name)).value.fill(0.0);
  for (const auto& t : m.tag_sentence(corpus.sentence(0).forms())) CHECK(t.raw() == "aa");
}

TEST_CASE("overfitting one sentence reproduces its tags") {
  const auto corpus = single_sentence();
  auto config = small_config(Mode::Baseline, 800);
  config.base_rate = 0.5;
  config.decay = 0.0;
  const auto inv = TagInventory::build(std::vector<std::string>{"aa", "nken", "p", "sfg3en", "c"});
  auto result = train_model(config, corpus, inv, nullptr);
  const auto forms = corpus.sentence(0).forms();
  std::vector<std::size_t> gold;
  for (const auto& t : corpus.sentence(0).tokens) gold.push_back(inv.index_of(t.gold.raw()));
  Graph g(result.model.parameters());
  CHECK(g.scalar(result.model.sentence_loss(g, forms, gold, {})) < 1e-3);
  const auto tags = result.model.tag_sentence(forms);
  for (std::size_t i = 0; i < tags.size(); ++i) CHECK(tags[i] == corpus.sentence(0).tokens[i].gold);
}

TEST_CASE("training is bit-reproducible and follows the rate schedule") {
  const auto bench = make_overfit_benchmark(2);
  const auto config = small_config(Mode::Baseline, 3, 5);
  const auto a = train_model(config, bench.train, *bench.tags, nullptr);
  const auto b = train_model(config, bench.train, *bench.tags, nullptr);
  for (std::size_t i = 0; i < a.model.parameters().size(); ++i)
    CHECK(a.model.parameters().at(i).value == b.model.parameters().at(i).value);
  REQUIRE(a.trace.size() == 3);
  for (const auto& e : a.trace) CHECK(std::abs(e.rate - 0.13 * std::pow(0.95, e.epoch)) <= 1e-12);

  const auto c = train_model(small_config(Mode::Baseline, 3, 6), bench.train, *bench.tags, nullptr);
  CHECK_FALSE(a.model.parameters().at(0).value == c.model.parameters().at(0).value);
}

TEST_CASE("training rejects tags outside the model inventory") {
  const auto corpus = single_sentence();
  const auto inv = TagInventory::build(std::vector<std::string>{"aa", "nken"});
  CHECK_THROWS_AS(train_model(small_config(Mode::Baseline, 1), corpus, inv, nullptr), InventoryMismatch);
  CHECK_THROWS_AS(train_model(small_config(Mode::WithLexicon, 1), corpus, inv, nullptr), MissingLexicon);
  CHECK_THROWS_AS(train_stepwise(small_config(Mode::WithLexiconAndCoarse, 1), corpus, inv, nullptr), MissingLexicon);
}

TEST_CASE("stepwise hints are the coarse model's predictions") {
  auto bench = make_stepwise_benchmark(4, StepwiseParams{1.0, false, 40, 30, 10, 5});
  const auto config = fit_dimensions(small_config(Mode::WithLexiconAndCoarse, 2), *bench.tags, &*bench.labels);
  const auto result = train_stepwise(config, bench.train, *bench.tags, bench.lexicon);
  REQUIRE(result.model.coarse_model() != nullptr);
  CHECK(result.coarse_trace.size() == 2);
  CHECK(result.model.coarse_model()->config().seed == coarse_seed(config.seed));
  for (const auto& s : bench.test.sentences()) {
    const auto forms = s.forms();
    const auto hints = result.model.coarse_hints(forms);
    CHECK(hints == result.model.coarse_model()->predict(forms));
    const auto coarse_tags = result.model.coarse_model()->tag_sentence(forms);
    for (std::size_t t = 0; t < hints.size(); ++t)
      CHECK(result.model.coarse().at(hints[t]) == coarse_tags[t].category());
    CHECK(result.model.predict(forms) == result.model.predict(forms, hints));
  }
}

TEST_CASE("out-of-vocabulary sentences are tagged") {
  const auto bench = make_overfit_benchmark(3);
  const auto result = train_model(small_config(Mode::Baseline, 1), bench.train, *bench.tags, nullptr);
  const std::vector<std::string> forms{"zzz", "Þórður", "qqq"};
  CHECK(result.model.tag_sentence(forms).size() == 3);
  CHECK_THROWS_AS(result.model.tag_sentence(std::vector<std::string>{}), EmptySentence);
}

TEST_CASE("full model gradients match finite differences") {
  for (Mode mode : {Mode::Baseline, Mode::WithLexicon, Mode::WithLexiconAndCoarse}) {
    auto setup = make_gradcheck_setup(mode);
    const auto r = check_gradients(setup);
    CHECK(r.checked == setup.model->parameters().scalar_count());
    CHECK_MESSAGE(r.failures == 0, mode_name(mode), ": ", r.worst_where);
  }
  auto learned = make_gradcheck_setup(Mode::WithLexiconAndCoarse, true);
  CHECK(learned.model->parameters().find("coarse_emb.w").has_value());
  const auto r = check_gradients(learned);
  CHECK_MESSAGE(r.failures == 0, r.worst_where);
}
