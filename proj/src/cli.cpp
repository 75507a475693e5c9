#include "morphtag/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "morphtag/corpus.hpp"
#include "morphtag/errors.hpp"
#include "morphtag/eval.hpp"
#include "morphtag/lexicon.hpp"
#include "morphtag/model_io.hpp"
#include "morphtag/tagger.hpp"

namespace morphtag::cli {

namespace fs = std::filesystem;

namespace {

// Raised for flag combinations CLI11 cannot express (exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string mode = "baseline";
  std::string corpus, lexicon, labels, tagset, folds, model, input, out, augment, config;
  int epochs = 0;
  double lr = 0, decay = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  int k = 10;
  double baseline_acc = 0;
  std::size_t word_dim = 0, char_dim = 0, char_hidden = 0, sentence_hidden = 0, ff_hidden = 0;
  bool gold_coarse_hints = false;
  bool learn_coarse_embedding = false;
  bool no_lowercase_fallback = false;
};

struct Options {
  CLI::Option* mode = nullptr;
  CLI::Option* epochs = nullptr;
  CLI::Option* lr = nullptr;
  CLI::Option* decay = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* baseline_acc = nullptr;
  CLI::Option* folds = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* word_dim = nullptr;
  CLI::Option* char_dim = nullptr;
  CLI::Option* char_hidden = nullptr;
  CLI::Option* sentence_hidden = nullptr;
  CLI::Option* ff_hidden = nullptr;
  CLI::Option* gold_coarse_hints = nullptr;
  CLI::Option* learn_coarse_embedding = nullptr;
};

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

void require(const std::string& value, const std::string& flag, const std::string& why) {
  if (value.empty()) throw UsageError(flag + " is required " + why);
}

void add_model_flags(CLI::App* cmd, Flags& f, Options& o) {
  o.mode = cmd->add_option("--mode", f.mode, "model: baseline, dmii (adds lexicon) or lc (adds coarse pass)")
               ->check(CLI::IsMember({"baseline", "dmii", "lc"}));
  o.epochs = cmd->add_option("--epochs", f.epochs, "training epochs (default 30)")->check(CLI::NonNegativeNumber);
  o.lr = cmd->add_option("--lr", f.lr, "initial learning rate (default 0.13)")->check(CLI::PositiveNumber);
  o.decay = cmd->add_option("--decay", f.decay, "learning-rate decay per epoch (default 0.05)")
                ->check(CLI::Range(0.0, 0.999999));
  o.seed = cmd->add_option("--seed", f.seed, "random seed (default 1)");
  o.word_dim = cmd->add_option("--word-dim", f.word_dim, "word embedding size (default 128)")->check(CLI::PositiveNumber);
  o.char_dim = cmd->add_option("--char-dim", f.char_dim, "character embedding size (default 20)")->check(CLI::PositiveNumber);
  o.char_hidden = cmd->add_option("--char-hidden", f.char_hidden, "character LSTM size per direction (default 20)")
                      ->check(CLI::PositiveNumber);
  o.sentence_hidden = cmd->add_option("--sentence-hidden", f.sentence_hidden,
                                      "sentence LSTM size per direction (default 32)")
                          ->check(CLI::PositiveNumber);
  o.ff_hidden = cmd->add_option("--ff-hidden", f.ff_hidden, "hidden layer size (default 32)")->check(CLI::PositiveNumber);
  o.gold_coarse_hints = cmd->add_flag("--gold-coarse-hints", f.gold_coarse_hints,
                                      "lc: train the fine model on gold categories instead of predicted ones");
  o.learn_coarse_embedding = cmd->add_flag("--learn-coarse-embedding", f.learn_coarse_embedding,
                                           "lc: pass the category one-hot through a learned layer");
  cmd->add_option("--config", f.config, "JSON file with model settings (flags take precedence)");
}

// Precedence: flags > config file > built-in defaults.
ModelConfig resolve_config(const Flags& f, const Options& o) {
  ModelConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw FileError("cannot open config file " + f.config);
    nlohmann::json j;
    try {
      in >> j;
      if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
      if (j.contains("word_dim")) c.word_dim = j.at("word_dim").get<std::size_t>();
      if (j.contains("char_dim")) c.char_dim = j.at("char_dim").get<std::size_t>();
      if (j.contains("char_hidden")) c.char_hidden = j.at("char_hidden").get<std::size_t>();
      if (j.contains("sentence_hidden")) c.sentence_hidden = j.at("sentence_hidden").get<std::size_t>();
      if (j.contains("ff_hidden")) c.ff_hidden = j.at("ff_hidden").get<std::size_t>();
      if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
      if (j.contains("lr")) c.base_rate = j.at("lr").get<double>();
      if (j.contains("decay")) c.decay = j.at("decay").get<double>();
      if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("gold_coarse_hints")) c.gold_coarse_hints = j.at("gold_coarse_hints").get<bool>();
      if (j.contains("learn_coarse_embedding")) c.learn_coarse_embedding = j.at("learn_coarse_embedding").get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file " + f.config + ": " + e.what());
    }
  }
  if (given(o.mode)) c.mode = parse_mode(f.mode);
  if (given(o.word_dim)) c.word_dim = f.word_dim;
  if (given(o.char_dim)) c.char_dim = f.char_dim;
  if (given(o.char_hidden)) c.char_hidden = f.char_hidden;
  if (given(o.sentence_hidden)) c.sentence_hidden = f.sentence_hidden;
  if (given(o.ff_hidden)) c.ff_hidden = f.ff_hidden;
  if (given(o.epochs)) c.epochs = f.epochs;
  if (given(o.lr)) c.base_rate = f.lr;
  if (given(o.decay)) c.decay = f.decay;
  if (given(o.seed)) c.seed = f.seed;
  if (given(o.gold_coarse_hints)) c.gold_coarse_hints = f.gold_coarse_hints;
  if (given(o.learn_coarse_embedding)) c.learn_coarse_embedding = f.learn_coarse_embedding;
  c.validate();
  return c;
}

LexiconOptions lexicon_options(const Flags& f) { return LexiconOptions{!f.no_lowercase_fallback}; }

std::shared_ptr<const MorphLexicon> load_lexicon_for(const Flags& f, const LabelInventory& labels) {
  return std::make_shared<const MorphLexicon>(load_lexicon(f.lexicon, labels, lexicon_options(f)));
}

void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + tmp.string());
    out << content;
    if (!out) throw FileError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_trace(const fs::path& path, const TrainTrace& trace) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& e : trace) os << e.epoch << '\t' << e.rate << '\t' << e.mean_loss << '\t' << e.train_accuracy << '\n';
  write_atomically(path, os.str());
}

fs::path with_extension(const fs::path& model_path, const std::string& ext) {
  fs::path p = model_path;
  p.replace_extension(ext);
  return p;
}

int cmd_train(const Flags& f, const Options& o, std::ostream& err) {
  require(f.corpus, "--corpus", "for train");
  require(f.tagset, "--tagset", "for train");
  require(f.out, "--out", "for train");
  ModelConfig config = resolve_config(f, o);
  if (uses_lexicon(config.mode)) {
    require(f.lexicon, "--lexicon", "for --mode " + std::string(mode_name(config.mode)));
    require(f.labels, "--labels", "for --mode " + std::string(mode_name(config.mode)));
  }

  auto inventory = std::make_shared<const TagInventory>(load_tagset(f.tagset));
  TaggedCorpus corpus = load_corpus(f.corpus, RoundRobinFolds{1}, inventory);
  if (!f.augment.empty()) corpus = augment_training(corpus, load_corpus(f.augment, RoundRobinFolds{1}, inventory));

  std::shared_ptr<const MorphLexicon> lexicon;
  std::optional<LabelInventory> labels;
  if (uses_lexicon(config.mode)) {
    labels = LabelInventory::load(f.labels);
    lexicon = load_lexicon_for(f, *labels);
  }
  config = fit_dimensions(config, *inventory, labels ? &*labels : nullptr);

  err << "training " << mode_name(config.mode) << " model on " << corpus.size() << " sentences ("
      << corpus.token_count() << " tokens), " << config.epochs << " epochs\n";
  TrainOptions opts;
  opts.on_epoch = [&err](const EpochStats& s) {
    err << "epoch " << s.epoch << " rate " << s.rate << " loss " << s.mean_loss << " acc " << s.train_accuracy << '\n';
  };
  TrainResult result = train_model(config, corpus, *inventory, lexicon, opts);

  const fs::path out_path(f.out);
  {
    std::ostringstream os;
    save_model(result.model, os);
    write_atomically(out_path, os.str());
  }
  write_trace(with_extension(out_path, ".trace"), result.trace);
  if (!result.coarse_trace.empty()) write_trace(with_extension(out_path, ".coarse.trace"), result.coarse_trace);
  err << "wrote " << out_path.string() << '\n';
  return kExitOk;
}

TaggerModel load_model_with_lexicon(const Flags& f) {
  TaggerModel model = load_model(fs::path(f.model));
  if (uses_lexicon(model.config().mode)) {
    require(f.lexicon, "--lexicon", "for a model trained in mode " + std::string(mode_name(model.config().mode)));
    model.attach_lexicon(load_lexicon_for(f, *model.labels()));
  }
  return model;
}

int cmd_tag(const Flags& f, std::ostream& out) {
  require(f.model, "--model", "for tag");
  require(f.input, "--input", "for tag");
  const TaggerModel model = load_model_with_lexicon(f);

  std::ifstream in(f.input);
  if (!in) throw FileError("cannot open input file " + f.input);
  const auto sentences = read_forms(in);
  std::vector<std::vector<std::string>> tags;
  tags.reserve(sentences.size());
  for (const auto& forms : sentences) {
    std::vector<std::string> row;
    for (const auto& t : model.tag_sentence(forms)) row.push_back(t.raw());
    tags.push_back(std::move(row));
  }
  std::ostringstream os;
  write_tagged(os, sentences, tags);
  if (f.out.empty()) {
    out << os.str();
  } else {
    write_atomically(f.out, os.str());
  }
  return kExitOk;
}

int cmd_eval(const Flags& f, const Options& o, std::ostream& out) {
  require(f.corpus, "--corpus", "for eval (gold standard)");
  require(f.input, "--input", "for eval (predictions)");
  const TaggedCorpus gold = load_corpus(f.corpus, RoundRobinFolds{1});
  const TaggedCorpus predicted = load_corpus(f.input, RoundRobinFolds{1});

  Vocabulary vocab;
  std::optional<LabelInventory> labels;
  if (!f.model.empty()) {
    TaggerModel model = load_model(fs::path(f.model));
    vocab = model.vocab();
    labels = model.labels();
  }
  std::shared_ptr<const MorphLexicon> lexicon;
  if (!f.lexicon.empty()) {
    if (!f.labels.empty()) labels = LabelInventory::load(f.labels);
    if (!labels) throw UsageError("--lexicon needs --labels or a lexicon-mode --model");
    lexicon = load_lexicon_for(f, *labels);
  }

  const EvalReport report = evaluate(predicted, gold, vocab, lexicon.get());
  std::optional<double> baseline;
  if (given(o.baseline_acc)) baseline = f.baseline_acc;

  std::ostringstream text, kv;
  write_report_text(text, report, baseline);
  write_report_kv(kv, report, baseline);
  if (f.out.empty()) {
    out << text.str();
  } else {
    write_atomically(f.out + ".txt", text.str());
    write_atomically(f.out + ".kv", kv.str());
  }
  return kExitOk;
}

int cmd_xval(const Flags& f, const Options& o, std::ostream& out, std::ostream& err) {
  require(f.corpus, "--corpus", "for xval");
  require(f.tagset, "--tagset", "for xval");
  require(f.out, "--out", "for xval (output directory)");
  if (given(o.folds) && given(o.k)) throw UsageError("--folds and --k are mutually exclusive");
  ModelConfig config = resolve_config(f, o);
  if (uses_lexicon(config.mode)) {
    require(f.lexicon, "--lexicon", "for --mode " + std::string(mode_name(config.mode)));
    require(f.labels, "--labels", "for --mode " + std::string(mode_name(config.mode)));
  }

  auto inventory = std::make_shared<const TagInventory>(load_tagset(f.tagset));
  const FoldSource source = f.folds.empty() ? FoldSource{RoundRobinFolds{f.k}} : FoldSource{FoldFile{f.folds}};
  const TaggedCorpus corpus = load_corpus(f.corpus, source, inventory);
  std::optional<TaggedCorpus> extra;
  if (!f.augment.empty()) extra = load_corpus(f.augment, RoundRobinFolds{1}, inventory);

  std::shared_ptr<const MorphLexicon> lexicon;
  std::optional<LabelInventory> labels;
  if (uses_lexicon(config.mode)) {
    labels = LabelInventory::load(f.labels);
    lexicon = load_lexicon_for(f, *labels);
  }
  config = fit_dimensions(config, *inventory, labels ? &*labels : nullptr);

  XvalOptions opts;
  opts.jobs = f.jobs;
  opts.extra = extra ? &*extra : nullptr;
  opts.on_epoch = [&err](int fold, const EpochStats& s) {
    err << "fold " << fold << " epoch " << s.epoch << " loss " << s.mean_loss << " acc " << s.train_accuracy << '\n';
  };
  const CrossValidationSummary summary = cross_validate(corpus, *inventory, config, lexicon, opts);

  const fs::path dir(f.out);
  fs::create_directories(dir);
  std::optional<double> baseline;
  if (given(o.baseline_acc)) baseline = f.baseline_acc;
  for (const auto& fold : summary.folds) {
    std::ostringstream text, kv;
    write_report_text(text, fold.report, baseline);
    kv << "fold=" << fold.fold << "\nseed=" << fold.seed << '\n';
    write_report_kv(kv, fold.report, baseline);
    write_atomically(dir / ("fold" + std::to_string(fold.fold) + ".txt"), text.str());
    write_atomically(dir / ("fold" + std::to_string(fold.fold) + ".kv"), kv.str());
  }

  std::ostringstream kv, text;
  kv << std::setprecision(17);
  kv << "mode=" << mode_name(config.mode) << "\nfolds=" << summary.folds.size() << "\nbase_seed=" << config.seed
     << '\n';
  for (const auto& fold : summary.folds) {
    kv << "fold." << fold.fold << ".seed=" << fold.seed << '\n'
       << "fold." << fold.fold << ".tokens=" << fold.report.total_tokens << '\n'
       << "fold." << fold.fold << ".correct=" << fold.report.correct_tokens << '\n'
       << "fold." << fold.fold << ".accuracy=" << fold.report.accuracy() * 100.0 << '\n';
  }
  kv << "mean_accuracy=" << summary.mean_accuracy * 100.0 << '\n'
     << "stddev_accuracy=" << summary.stddev_accuracy * 100.0 << '\n';
  write_report_kv(kv, summary.pooled, baseline);

  text << "cross-validation, " << summary.folds.size() << " folds, mode " << mode_name(config.mode) << "\n";
  for (const auto& fold : summary.folds) {
    text << "  fold " << fold.fold << "  seed " << fold.seed << "  accuracy " << std::fixed << std::setprecision(2)
         << fold.report.accuracy() * 100.0 << "  (" << fold.report.total_tokens << " tokens)\n";
  }
  text << "token-weighted mean " << std::fixed << std::setprecision(2) << summary.mean_accuracy * 100.0
       << "  stddev " << summary.stddev_accuracy * 100.0 << "\n\npooled\n";
  write_report_text(text, summary.pooled, baseline);
  write_atomically(dir / "summary.kv", kv.str());
  write_atomically(dir / "summary.txt", text.str());
  out << text.str();
  return kExitOk;
}

int cmd_inspect(const Flags& f, std::ostream& out) {
  require(f.model, "--model", "for inspect");
  const TaggerModel model = load_model(fs::path(f.model));
  auto describe = [&out](const TaggerModel& m, const std::string& indent) {
    const ModelConfig& c = m.config();
    out << indent << "mode            " << mode_name(c.mode) << '\n'
        << indent << "seed            " << c.seed << '\n'
        << indent << "word_dim        " << c.word_dim << '\n'
        << indent << "char_dim        " << c.char_dim << '\n'
        << indent << "char_hidden     " << c.char_hidden << '\n'
        << indent << "sentence_hidden " << c.sentence_hidden << '\n'
        << indent << "ff_hidden       " << c.ff_hidden << '\n'
        << indent << "input_width     " << c.token_input_width() << '\n'
        << indent << "epochs          " << c.epochs << '\n'
        << indent << "lr              " << c.base_rate << '\n'
        << indent << "decay           " << c.decay << '\n'
        << indent << "tags            " << m.tags().size() << '\n'
        << indent << "categories      " << m.coarse().size() << '\n'
        << indent << "labels          " << (m.labels() ? m.labels()->size() : 0) << '\n'
        << indent << "words           " << m.vocab().word_count() << '\n'
        << indent << "chars           " << m.vocab().char_count() << '\n'
        << indent << "parameters      " << m.parameters().scalar_count() << '\n';
  };
  out << "format_version  " << kModelFormatVersion << '\n';
  describe(model, "");
  if (model.coarse_model()) {
    out << "coarse model:\n";
    describe(*model.coarse_model(), "  ");
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Morphosyntactic tagger with character, lexicon and stepwise category features", "morphtag"};
  app.require_subcommand(1);
  Flags f;
  Options train_o, eval_o, xval_o;

  CLI::App* train = app.add_subcommand("train", "train a model on a tagged corpus");
  add_model_flags(train, f, train_o);
  train->add_option("--corpus", f.corpus, "training corpus (<form>\\t<tag> per line)");
  train->add_option("--augment", f.augment, "additional training corpus");
  train->add_option("--tagset", f.tagset, "tagset file, one tag per line");
  train->add_option("--lexicon", f.lexicon, "morphological lexicon (<form>\\t<label>;...)");
  train->add_option("--labels", f.labels, "lexicon label inventory, one per line");
  train->add_option("--out", f.out, "model file to write (trace goes next to it)");
  train->add_flag("--no-lowercase-fallback", f.no_lowercase_fallback, "exact-case lexicon lookup only");

  CLI::App* tag = app.add_subcommand("tag", "tag pre-tokenized text");
  tag->add_option("--model", f.model, "model file");
  tag->add_option("--input", f.input, "one form per line, blank line between sentences");
  tag->add_option("--lexicon", f.lexicon, "lexicon (dmii and lc models)");
  tag->add_option("--out", f.out, "output file (default: standard output)");
  tag->add_flag("--no-lowercase-fallback", f.no_lowercase_fallback, "exact-case lexicon lookup only");

  CLI::App* eval = app.add_subcommand("eval", "score predictions against a gold corpus");
  eval->add_option("--corpus", f.corpus, "gold corpus");
  eval->add_option("--input", f.input, "predicted corpus, same tokens as gold");
  eval->add_option("--model", f.model, "model whose training vocabulary defines known words");
  eval->add_option("--lexicon", f.lexicon, "lexicon; its forms also count as known");
  eval->add_option("--labels", f.labels, "label inventory for --lexicon");
  eval->add_option("--out", f.out, "report prefix: writes <out>.txt and <out>.kv");
  eval_o.baseline_acc = eval->add_option("--baseline-acc", f.baseline_acc, "report error reduction against this accuracy (%)")
                       ->check(CLI::Range(0.0, 100.0));
  eval->add_flag("--no-lowercase-fallback", f.no_lowercase_fallback, "exact-case lexicon lookup only");

  CLI::App* xval = app.add_subcommand("xval", "k-fold cross-validation");
  add_model_flags(xval, f, xval_o);
  xval->add_option("--corpus", f.corpus, "tagged corpus");
  xval->add_option("--augment", f.augment, "corpus added to every training split, never tested");
  xval->add_option("--tagset", f.tagset, "tagset file");
  xval->add_option("--lexicon", f.lexicon, "morphological lexicon");
  xval->add_option("--labels", f.labels, "lexicon label inventory");
  xval_o.folds = xval->add_option("--folds", f.folds, "fold file, one fold id per sentence");
  xval_o.k = xval->add_option("--k", f.k, "round-robin folds when no fold file is given (default 10)")
            ->check(CLI::Range(2, 1000));
  xval->add_option("--jobs", f.jobs, "folds trained in parallel")->check(CLI::Range(1, 256));
  xval->add_option("--out", f.out, "output directory for fold and summary reports");
  xval_o.baseline_acc = xval->add_option("--baseline-acc", f.baseline_acc, "report error reduction against this accuracy (%)")
                       ->check(CLI::Range(0.0, 100.0));
  xval->add_flag("--no-lowercase-fallback", f.no_lowercase_fallback, "exact-case lexicon lookup only");

  CLI::App* inspect = app.add_subcommand("inspect", "print model metadata");
  inspect->add_option("--model", f.model, "model file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(f, train_o, err);
    if (tag->parsed()) return cmd_tag(f, out);
    if (eval->parsed()) return cmd_eval(f, eval_o, out);
    if (xval->parsed()) return cmd_xval(f, xval_o, out, err);
    if (inspect->parsed()) return cmd_inspect(f, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const VersionMismatch& e) {
    err << "error: model version mismatch: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace morphtag::cli
