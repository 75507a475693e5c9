#include "morphtag/tagger.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "morphtag/errors.hpp"
#include "morphtag/optimizer.hpp"
#include "morphtag/softmax.hpp"
#include "morphtag/utf8.hpp"

namespace morphtag {

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Baseline:
      return "baseline";
    case Mode::WithLexicon:
      return "dmii";
    case Mode::WithLexiconAndCoarse:
      return "lc";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "baseline") return Mode::Baseline;
  if (name == "dmii") return Mode::WithLexicon;
  if (name == "lc") return Mode::WithLexiconAndCoarse;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected baseline, dmii or lc)");
}

bool uses_lexicon(Mode mode) { return mode != Mode::Baseline; }

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(word_dim, "word_dim");
  positive(char_dim, "char_dim");
  positive(char_hidden, "char_hidden");
  positive(sentence_hidden, "sentence_hidden");
  positive(ff_hidden, "ff_hidden");
  if (uses_lexicon(mode)) positive(lexicon_dim, "lexicon_dim");
  if (mode == Mode::WithLexiconAndCoarse) positive(coarse_dim, "coarse_dim");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  OptimizerState{base_rate, decay, 0}.validate();
}

std::size_t ModelConfig::token_input_width() const {
  std::size_t width = word_dim + 2 * char_hidden;
  if (uses_lexicon(mode)) width += lexicon_dim;
  if (mode == Mode::WithLexiconAndCoarse) width += coarse_dim;
  return width;
}

ModelConfig fit_dimensions(ModelConfig config, const TagInventory& fine, const LabelInventory* labels) {
  if (labels != nullptr) config.lexicon_dim = labels->size();
  config.coarse_dim = CoarseInventory::build(fine).size();
  return config;
}

namespace {

void init_embeddings(Tensor& table, std::mt19937_64& rng) {
  init_uniform_glorot(table.data(), table.cols(), 1, rng);
}

ParamId require(const ParameterStore& store, const std::string& name) {
  auto id = store.find(name);
  if (!id) throw ModelFormatError("missing parameter '" + name + "'");
  return *id;
}

void check_shape(const ParameterStore& store, ParamId id, std::vector<std::size_t> shape) {
  const Parameter& p = store.at(id);
  if (p.value.shape() != shape) throw ModelFormatError("parameter '" + p.name + "' has an unexpected shape");
}

}  // namespace

TaggerModel::TaggerModel(ModelConfig config, TagInventory tags, Vocabulary vocab,
                         std::optional<LabelInventory> labels)
    : config_(config), tags_(std::move(tags)), vocab_(std::move(vocab)), labels_(std::move(labels)) {
  config_.validate();
  if (tags_.empty()) throw EmptyTagsetError("model needs a non-empty output inventory");
  coarse_ = CoarseInventory::build(tags_);
  check_dimensions();

  std::seed_seq seq{static_cast<std::uint32_t>(config_.seed), static_cast<std::uint32_t>(config_.seed >> 32), 1u};
  std::mt19937_64 rng(seq);

  word_emb_ = params_.add("word_emb", {vocab_.word_count(), config_.word_dim}, true);
  init_embeddings(params_.at(word_emb_).value, rng);
  char_emb_ = params_.add("char_emb", {vocab_.char_count(), config_.char_dim}, true);
  init_embeddings(params_.at(char_emb_).value, rng);
  char_encoder_ = BiEncoderParams::create(params_, "char_enc", config_.char_dim, config_.char_hidden, rng);
  if (config_.mode == Mode::WithLexiconAndCoarse && config_.learn_coarse_embedding) {
    coarse_emb_w_ = params_.add("coarse_emb.w", {config_.coarse_dim, config_.coarse_dim});
    init_uniform_glorot(params_.at(*coarse_emb_w_).value.data(), config_.coarse_dim, config_.coarse_dim, rng);
    coarse_emb_b_ = params_.add("coarse_emb.b", {config_.coarse_dim});
  }
  sentence_encoder_ =
      BiEncoderParams::create(params_, "sent_enc", config_.token_input_width(), config_.sentence_hidden, rng);
  hidden_w_ = params_.add("hidden.w", {config_.ff_hidden, 2 * config_.sentence_hidden});
  init_uniform_glorot(params_.at(hidden_w_).value.data(), 2 * config_.sentence_hidden, config_.ff_hidden, rng);
  hidden_b_ = params_.add("hidden.b", {config_.ff_hidden});
  out_w_ = params_.add("out.w", {tags_.size(), config_.ff_hidden});
  init_uniform_glorot(params_.at(out_w_).value.data(), config_.ff_hidden, tags_.size(), rng);
  out_b_ = params_.add("out.b", {tags_.size()});
}

TaggerModel::TaggerModel(ModelConfig config, TagInventory tags, Vocabulary vocab,
                         std::optional<LabelInventory> labels, ParameterStore params)
    : config_(config),
      tags_(std::move(tags)),
      vocab_(std::move(vocab)),
      labels_(std::move(labels)),
      params_(std::move(params)) {
  config_.validate();
  if (tags_.empty()) throw EmptyTagsetError("model needs a non-empty output inventory");
  coarse_ = CoarseInventory::build(tags_);
  check_dimensions();
  bind_parameters();
}

void TaggerModel::check_dimensions() const {
  if (uses_lexicon(config_.mode)) {
    if (!labels_) throw ConfigError("mode '" + std::string(mode_name(config_.mode)) + "' needs a label inventory");
    if (labels_->size() != config_.lexicon_dim) {
      throw ConfigError("lexicon_dim is " + std::to_string(config_.lexicon_dim) + " but the label inventory has " +
                        std::to_string(labels_->size()) + " labels");
    }
  }
  if (config_.mode == Mode::WithLexiconAndCoarse && coarse_.size() != config_.coarse_dim) {
    throw ConfigError("coarse_dim is " + std::to_string(config_.coarse_dim) + " but the tagset has " +
                      std::to_string(coarse_.size()) + " lexical categories");
  }
}

void TaggerModel::bind_parameters() {
  word_emb_ = require(params_, "word_emb");
  check_shape(params_, word_emb_, {vocab_.word_count(), config_.word_dim});
  char_emb_ = require(params_, "char_emb");
  check_shape(params_, char_emb_, {vocab_.char_count(), config_.char_dim});
  params_.at(word_emb_).row_sparse = true;
  params_.at(word_emb_).touched.assign(vocab_.word_count(), false);
  params_.at(char_emb_).row_sparse = true;
  params_.at(char_emb_).touched.assign(vocab_.char_count(), false);
  char_encoder_ = BiEncoderParams::bind(params_, "char_enc");
  if (char_encoder_.forward.input_dim != config_.char_dim || char_encoder_.forward.hidden_dim != config_.char_hidden) {
    throw ModelFormatError("character encoder shape disagrees with the configuration");
  }
  if (config_.mode == Mode::WithLexiconAndCoarse && config_.learn_coarse_embedding) {
    coarse_emb_w_ = require(params_, "coarse_emb.w");
    check_shape(params_, *coarse_emb_w_, {config_.coarse_dim, config_.coarse_dim});
    coarse_emb_b_ = require(params_, "coarse_emb.b");
    check_shape(params_, *coarse_emb_b_, {config_.coarse_dim});
  }
  sentence_encoder_ = BiEncoderParams::bind(params_, "sent_enc");
  if (sentence_encoder_.forward.input_dim != config_.token_input_width() ||
      sentence_encoder_.forward.hidden_dim != config_.sentence_hidden) {
    throw ModelFormatError("sentence encoder shape disagrees with the configuration");
  }
  hidden_w_ = require(params_, "hidden.w");
  check_shape(params_, hidden_w_, {config_.ff_hidden, 2 * config_.sentence_hidden});
  hidden_b_ = require(params_, "hidden.b");
  check_shape(params_, hidden_b_, {config_.ff_hidden});
  out_w_ = require(params_, "out.w");
  check_shape(params_, out_w_, {tags_.size(), config_.ff_hidden});
  out_b_ = require(params_, "out.b");
  check_shape(params_, out_b_, {tags_.size()});
}

void TaggerModel::attach_lexicon(std::shared_ptr<const MorphLexicon> lexicon) {
  if (lexicon && labels_ && !(lexicon->labels() == *labels_)) {
    throw InventoryMismatch("lexicon labels differ from the labels the model was trained with");
  }
  lexicon_ = lexicon;
  if (coarse_model_) coarse_model_->attach_lexicon(std::move(lexicon));
}

void TaggerModel::set_coarse_model(std::unique_ptr<TaggerModel> coarse) {
  if (config_.mode != Mode::WithLexiconAndCoarse) {
    throw ConfigError("only a stepwise (lc) model embeds a coarse model");
  }
  if (coarse && !(coarse->tags() == coarse_.as_tag_inventory())) {
    throw InventoryMismatch("coarse model outputs differ from this model's lexical categories");
  }
  coarse_model_ = std::move(coarse);
  if (coarse_model_ && lexicon_) coarse_model_->attach_lexicon(lexicon_);
}

NodeId TaggerModel::encode_token(Graph& g, std::string_view form, std::optional<std::size_t> coarse_hint) const {
  const bool wants_hint = config_.mode == Mode::WithLexiconAndCoarse;
  if (wants_hint && !coarse_hint) throw MissingCoarseHint("stepwise model needs a coarse hint per token");
  if (!wants_hint && coarse_hint) throw UnexpectedCoarseHint("coarse hint given to a non-stepwise model");

  std::vector<NodeId> parts;
  parts.push_back(g.lookup(word_emb_, vocab_.word_id(form)));

  const std::u32string chars = utf8::decode(form);
  std::vector<NodeId> char_inputs;
  char_inputs.reserve(chars.size() + 2);
  char_inputs.push_back(g.lookup(char_emb_, Vocabulary::kWordStart));
  for (char32_t c : chars) char_inputs.push_back(g.lookup(char_emb_, vocab_.char_id(c)));
  char_inputs.push_back(g.lookup(char_emb_, Vocabulary::kWordEnd));
  parts.push_back(bi_summary(g, char_encoder_, char_inputs));

  if (uses_lexicon(config_.mode)) {
    if (!lexicon_) throw MissingLexicon("mode '" + std::string(mode_name(config_.mode)) + "' needs a lexicon");
    parts.push_back(g.input(lexicon_->encode_nhot(form)));
  }
  if (wants_hint) {
    if (*coarse_hint >= config_.coarse_dim) {
      throw BadClassIndex("coarse hint " + std::to_string(*coarse_hint) + " out of range");
    }
    std::vector<double> one_hot(config_.coarse_dim, 0.0);
    one_hot[*coarse_hint] = 1.0;
    NodeId hint = g.input(std::move(one_hot));
    if (coarse_emb_w_) {
      const std::array<std::pair<ParamId, NodeId>, 1> terms{{{*coarse_emb_w_, hint}}};
      hint = g.affine(*coarse_emb_b_, terms);
    }
    parts.push_back(hint);
  }
  return g.concat(parts);
}

std::vector<NodeId> TaggerModel::logits(Graph& g, std::span<const std::string> forms,
                                        std::span<const std::size_t> hints) const {
  if (forms.empty()) throw EmptySentence("cannot tag an empty sentence");
  const bool wants_hint = config_.mode == Mode::WithLexiconAndCoarse;
  if (wants_hint && hints.size() != forms.size()) {
    throw MissingCoarseHint("expected " + std::to_string(forms.size()) + " coarse hints, got " +
                            std::to_string(hints.size()));
  }
  if (!wants_hint && !hints.empty()) throw UnexpectedCoarseHint("coarse hints given to a non-stepwise model");

  std::vector<NodeId> inputs;
  inputs.reserve(forms.size());
  for (std::size_t t = 0; t < forms.size(); ++t) {
    inputs.push_back(encode_token(g, forms[t], wants_hint ? std::optional<std::size_t>(hints[t]) : std::nullopt));
  }
  const std::vector<NodeId> states = bi_encode(g, sentence_encoder_, inputs);
  std::vector<NodeId> out;
  out.reserve(states.size());
  for (NodeId s : states) {
    const std::array<std::pair<ParamId, NodeId>, 1> hidden_terms{{{hidden_w_, s}}};
    const NodeId hidden = g.tanh(g.affine(hidden_b_, hidden_terms));
    const std::array<std::pair<ParamId, NodeId>, 1> out_terms{{{out_w_, hidden}}};
    out.push_back(g.affine(out_b_, out_terms));
  }
  return out;
}

NodeId TaggerModel::sentence_loss(Graph& g, std::span<const std::string> forms, std::span<const std::size_t> gold,
                                  std::span<const std::size_t> hints, std::vector<std::size_t>* predictions) const {
  if (gold.size() != forms.size()) throw AlignmentError("gold tags and forms differ in length");
  const std::vector<NodeId> scores = logits(g, forms, hints);
  std::vector<NodeId> losses;
  losses.reserve(scores.size());
  if (predictions) predictions->clear();
  for (std::size_t t = 0; t < scores.size(); ++t) {
    losses.push_back(g.pick_neg_log_softmax(scores[t], gold[t]));
    if (predictions) predictions->push_back(argmax(g.value(scores[t])));
  }
  return g.sum(losses);
}

std::vector<std::size_t> TaggerModel::coarse_hints(std::span<const std::string> forms) const {
  if (!coarse_model_) throw ConfigError("stepwise model has no coarse model attached");
  return coarse_model_->predict(forms);
}

std::vector<std::size_t> TaggerModel::predict(std::span<const std::string> forms) const {
  if (config_.mode == Mode::WithLexiconAndCoarse) {
    const std::vector<std::size_t> hints = coarse_hints(forms);
    return predict(forms, hints);
  }
  return predict(forms, {});
}

std::vector<std::size_t> TaggerModel::predict(std::span<const std::string> forms,
                                              std::span<const std::size_t> hints) const {
  Graph g(params_);
  const std::vector<NodeId> scores = logits(g, forms, hints);
  std::vector<std::size_t> out;
  out.reserve(scores.size());
  for (NodeId s : scores) out.push_back(argmax(g.value(s)));
  return out;
}

std::vector<MnemonicTag> TaggerModel::tag_sentence(std::span<const std::string> forms) const {
  if (forms.empty()) throw EmptySentence("cannot tag an empty sentence");
  std::vector<MnemonicTag> out;
  for (std::size_t idx : predict(forms)) out.push_back(tags_.at(idx));
  return out;
}

TrainTrace train(TaggerModel& model, const TaggedCorpus& corpus, const TrainOptions& options) {
  const ModelConfig& cfg = model.config();
  const std::size_t n = corpus.size();

  std::vector<std::vector<std::string>> forms(n);
  std::vector<std::vector<std::size_t>> gold(n);
  std::vector<std::vector<std::size_t>> hints(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Sentence& sentence = corpus.sentence(s);
    forms[s] = sentence.forms();
    for (const Token& t : sentence.tokens) {
      auto idx = model.tags().find(t.gold.raw());
      if (!idx) {
        throw InventoryMismatch("training tag '" + t.gold.raw() + "' (sentence " + std::to_string(s + 1) +
                                ") is not in the model inventory");
      }
      gold[s].push_back(*idx);
    }
    if (cfg.mode == Mode::WithLexiconAndCoarse) {
      if (cfg.gold_coarse_hints) {
        for (const Token& t : sentence.tokens) hints[s].push_back(model.coarse().index_of(t.gold.category()));
      } else {
        hints[s] = model.coarse_hints(forms[s]);
      }
    }
  }

  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 2u};
  std::mt19937_64 shuffle_rng(seq);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  OptimizerState opt{cfg.base_rate, cfg.decay, 0};
  TrainTrace trace;
  std::vector<std::size_t> predictions;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.epoch = epoch;
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total_loss = 0.0;
    std::size_t tokens = 0, correct = 0;
    for (std::size_t s : order) {
      Graph g(model.parameters());
      const NodeId loss = model.sentence_loss(g, forms[s], gold[s], hints[s], &predictions);
      const double value = g.scalar(loss);
      if (!std::isfinite(value)) {
        throw NonFiniteLoss("non-finite loss in epoch " + std::to_string(epoch) + ", sentence " +
                            std::to_string(s + 1));
      }
      g.backward(loss);
      sgd_step(model.parameters(), opt);
      total_loss += value;
      tokens += gold[s].size();
      for (std::size_t t = 0; t < predictions.size(); ++t) correct += predictions[t] == gold[s][t];
    }
    EpochStats stats{epoch, opt.rate(), total_loss / static_cast<double>(tokens),
                     static_cast<double>(correct) / static_cast<double>(tokens)};
    trace.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);
  }
  return trace;
}

std::uint64_t coarse_seed(std::uint64_t fine_seed) { return fine_seed ^ 0x9E3779B97F4A7C15ull; }

TrainResult train_model(const ModelConfig& config, const TaggedCorpus& corpus, const TagInventory& fine,
                        std::shared_ptr<const MorphLexicon> lexicon, const TrainOptions& options) {
  if (config.mode == Mode::WithLexiconAndCoarse) return train_stepwise(config, corpus, fine, lexicon, options);
  if (uses_lexicon(config.mode) && !lexicon) {
    throw MissingLexicon("mode '" + std::string(mode_name(config.mode)) + "' needs a lexicon");
  }
  std::optional<LabelInventory> labels;
  if (uses_lexicon(config.mode)) labels = lexicon->labels();
  TaggerModel model(config, fine, Vocabulary::build(corpus), std::move(labels));
  model.attach_lexicon(lexicon);
  TrainTrace trace = train(model, corpus, options);
  return TrainResult{std::move(model), std::move(trace), {}};
}

TrainResult train_stepwise(const ModelConfig& fine_config, const TaggedCorpus& corpus, const TagInventory& fine,
                           std::shared_ptr<const MorphLexicon> lexicon, const TrainOptions& options) {
  if (!lexicon) throw MissingLexicon("stepwise training needs a lexicon");
  ModelConfig fine_cfg = fine_config;
  fine_cfg.mode = Mode::WithLexiconAndCoarse;

  ModelConfig coarse_cfg = fine_cfg;
  coarse_cfg.mode = Mode::WithLexicon;
  coarse_cfg.seed = coarse_seed(fine_cfg.seed);

  const CoarseInventory categories = CoarseInventory::build(fine);
  const Vocabulary vocab = Vocabulary::build(corpus);

  auto coarse = std::make_unique<TaggerModel>(coarse_cfg, categories.as_tag_inventory(), vocab, lexicon->labels());
  coarse->attach_lexicon(lexicon);
  TrainTrace coarse_trace = train(*coarse, project_to_coarse(corpus));

  TaggerModel model(fine_cfg, fine, vocab, lexicon->labels());
  model.attach_lexicon(lexicon);
  model.set_coarse_model(std::move(coarse));
  TrainTrace trace = train(model, corpus, options);
  return TrainResult{std::move(model), std::move(trace), std::move(coarse_trace)};
}

}  // namespace morphtag
