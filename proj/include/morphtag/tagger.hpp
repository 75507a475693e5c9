#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphtag/corpus.hpp"
#include "morphtag/graph.hpp"
#include "morphtag/lexicon.hpp"
#include "morphtag/lstm.hpp"
#include "morphtag/tagset.hpp"

namespace morphtag {

enum class Mode : std::uint8_t { Baseline = 0, WithLexicon = 1, WithLexiconAndCoarse = 2 };

/// "baseline", "dmii", "lc".
std::string_view mode_name(Mode mode);
/// Throws ConfigError.
Mode parse_mode(std::string_view name);
bool uses_lexicon(Mode mode);

struct ModelConfig {
  std::size_t word_dim = 128;
  std::size_t char_dim = 20;
  std::size_t char_hidden = 20;      // per direction
  std::size_t sentence_hidden = 32;  // per direction
  std::size_t ff_hidden = 32;
  std::size_t lexicon_dim = 61;
  std::size_t coarse_dim = 10;
  int epochs = 30;
  double base_rate = 0.13;
  double decay = 0.05;
  Mode mode = Mode::Baseline;
  std::uint64_t seed = 1;
  // Feed gold categories instead of the coarse model's predictions while
  // training the fine model.
  bool gold_coarse_hints = false;
  // Pass the coarse one-hot through a learned coarse_dim x coarse_dim layer.
  bool learn_coarse_embedding = false;

  /// Throws ConfigError.
  void validate() const;
  /// word_dim + 2*char_hidden (+ lexicon_dim) (+ coarse_dim), by mode.
  std::size_t token_input_width() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct EpochStats {
  int epoch = 0;
  double rate = 0.0;
  double mean_loss = 0.0;       // per token
  double train_accuracy = 0.0;  // of the predictions made before each update
};
using TrainTrace = std::vector<EpochStats>;

struct TrainOptions {
  std::function<void(const EpochStats&)> on_epoch;
};

// Word embedding + character BiLSTM summary (+ lexicon n-hot) (+ coarse
// one-hot) -> sentence BiLSTM -> tanh hidden layer -> output scores.
class TaggerModel {
 public:
  /// Fresh model, parameters initialized from config.seed. The output layer
  /// covers `tags`. Throws ConfigError on inconsistent dimensions.
  TaggerModel(ModelConfig config, TagInventory tags, Vocabulary vocab, std::optional<LabelInventory> labels);
  /// Model around already-trained parameters (deserialization).
  TaggerModel(ModelConfig config, TagInventory tags, Vocabulary vocab, std::optional<LabelInventory> labels,
              ParameterStore params);

  TaggerModel(TaggerModel&&) noexcept = default;
  TaggerModel& operator=(TaggerModel&&) noexcept = default;

  const ModelConfig& config() const { return config_; }
  const TagInventory& tags() const { return tags_; }
  const CoarseInventory& coarse() const { return coarse_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::optional<LabelInventory>& labels() const { return labels_; }
  const ParameterStore& parameters() const { return params_; }
  ParameterStore& parameters() { return params_; }

  /// Attaches to this model and its coarse model. The label inventory must
  /// match the one the model was built with.
  void attach_lexicon(std::shared_ptr<const MorphLexicon> lexicon);
  const MorphLexicon* lexicon() const { return lexicon_.get(); }

  void set_coarse_model(std::unique_ptr<TaggerModel> coarse);
  const TaggerModel* coarse_model() const { return coarse_model_.get(); }
  TaggerModel* coarse_model() { return coarse_model_.get(); }

  /// Input vector of one token. coarse_hint indexes coarse() and must be
  /// present exactly in WithLexiconAndCoarse mode.
  NodeId encode_token(Graph& g, std::string_view form, std::optional<std::size_t> coarse_hint) const;

  /// Output scores per token. `hints` is empty unless the mode needs it.
  std::vector<NodeId> logits(Graph& g, std::span<const std::string> forms, std::span<const std::size_t> hints) const;

  /// Summed token cross-entropy. Writes argmax predictions when asked.
  NodeId sentence_loss(Graph& g, std::span<const std::string> forms, std::span<const std::size_t> gold,
                       std::span<const std::size_t> hints, std::vector<std::size_t>* predictions = nullptr) const;

  /// Coarse indices predicted by the embedded coarse model.
  std::vector<std::size_t> coarse_hints(std::span<const std::string> forms) const;

  /// Argmax output indices; runs the coarse model first in stepwise mode.
  std::vector<std::size_t> predict(std::span<const std::string> forms) const;
  /// Same, with caller-supplied coarse hints.
  std::vector<std::size_t> predict(std::span<const std::string> forms, std::span<const std::size_t> hints) const;

  /// Throws EmptySentence.
  std::vector<MnemonicTag> tag_sentence(std::span<const std::string> forms) const;

 private:
  void bind_parameters();
  void check_dimensions() const;

  ModelConfig config_;
  TagInventory tags_;
  CoarseInventory coarse_;
  Vocabulary vocab_;
  std::optional<LabelInventory> labels_;
  ParameterStore params_;
  std::shared_ptr<const MorphLexicon> lexicon_;
  std::unique_ptr<TaggerModel> coarse_model_;

  ParamId word_emb_ = 0;
  ParamId char_emb_ = 0;
  BiEncoderParams char_encoder_;
  BiEncoderParams sentence_encoder_;
  std::optional<ParamId> coarse_emb_w_;
  std::optional<ParamId> coarse_emb_b_;
  ParamId hidden_w_ = 0;
  ParamId hidden_b_ = 0;
  ParamId out_w_ = 0;
  ParamId out_b_ = 0;
};

/// Trains in place: config.epochs passes of per-sentence SGD over a seeded
/// shuffle. Throws InventoryMismatch or NonFiniteLoss.
TrainTrace train(TaggerModel& model, const TaggedCorpus& corpus, const TrainOptions& options = {});

struct TrainResult {
  TaggerModel model;
  TrainTrace trace;
  TrainTrace coarse_trace;  // stepwise mode only
};

/// Seed used for the coarse pass of a stepwise model.
std::uint64_t coarse_seed(std::uint64_t fine_seed);

/// Builds a vocabulary from `train` and trains a model of config.mode.
/// Dimensions tied to data (lexicon_dim, coarse_dim) must already match.
TrainResult train_model(const ModelConfig& config, const TaggedCorpus& corpus, const TagInventory& fine,
                        std::shared_ptr<const MorphLexicon> lexicon, const TrainOptions& options = {});

/// Coarse pass (WithLexicon over lexical categories) followed by the fine
/// pass fed with its predictions.
TrainResult train_stepwise(const ModelConfig& fine_config, const TaggedCorpus& corpus, const TagInventory& fine,
                           std::shared_ptr<const MorphLexicon> lexicon, const TrainOptions& options = {});

/// Sets lexicon_dim and coarse_dim from the data the model will see.
ModelConfig fit_dimensions(ModelConfig config, const TagInventory& fine, const LabelInventory* labels);

}  // namespace morphtag
