#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "morphtag/cli.hpp"
#include "morphtag/corpus.hpp"
#include "morphtag/eval.hpp"

namespace fs = std::filesystem;
using namespace morphtag;

namespace {

struct Workspace {
  fs::path dir;

  Workspace() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("morphtag_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
    write("toy.tsv",
          "Hestur\tnken\nhleypur\tsfg3en\nhratt\taa\n.\tp\n\n"
          "Hún\tfpven\nsá\tsfg3eþ\nhestinn\tnkeog\n.\tp\n\n"
          "Bókin\tnveng\ner\tsfg3en\ngóð\tlvensf\n\n"
          "Hestur\tnken\nsá\tsfg3eþ\nbókina\tnveog\n.\tp\n");
    write("tags.txt", "nken\nsfg3en\naa\np\nfpven\nsfg3eþ\nnkeog\nnveng\nlvensf\nnveog\n");
    write("labels.txt", "no\nso\nlo\nao\nfn\n");
    write("lexicon.tsv", "hestur\tno\nhleypur\tso\nhratt\tao\nhún\tfn\nsá\tso;fn\nhestinn\tno\nbókin\tno\ner\tso\ngóð\tlo\n");
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& content) const { std::ofstream(dir / name) << content; }
  std::string read(const std::string& name) const {
    std::ifstream in(dir / name, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
};

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> train_args(const Workspace& w, const std::string& mode, const std::string& out,
                                    const std::string& seed = "7") {
  std::vector<std::string> args{"train", "--mode", mode, "--corpus", w.path("toy.tsv"), "--tagset",
                                w.path("tags.txt"), "--seed", seed, "--out", w.path(out), "--epochs", "2",
                                "--word-dim", "8", "--char-dim", "4", "--char-hidden", "4",
                                "--sentence-hidden", "6", "--ff-hidden", "6"};
  if (mode != "baseline") {
    for (const auto& a : {"--lexicon", "lexicon.tsv", "--labels", "labels.txt"}) args.push_back(a);
    args[args.size() - 3] = w.path("lexicon.tsv");
    args[args.size() - 1] = w.path("labels.txt");
  }
  return args;
}

}  // namespace

TEST_CASE("train writes the model and its trace") {
  Workspace w;
  const auto r = run(train_args(w, "baseline", "m.bin"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(fs::exists(w.dir / "m.bin"));
  CHECK(fs::exists(w.dir / "m.trace"));
  std::istringstream trace(w.read("m.trace"));
  std::string line;
  int lines = 0;
  while (std::getline(trace, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), '\t') == 3);
  }
  CHECK(lines == 2);
}

TEST_CASE("training reruns are byte-identical") {
  Workspace w;
  REQUIRE(run(train_args(w, "lc", "a.bin")).code == 0);
  REQUIRE(run(train_args(w, "lc", "b.bin")).code == 0);
  REQUIRE(run(train_args(w, "lc", "c.bin", "8")).code == 0);
  CHECK(w.read("a.bin") == w.read("b.bin"));
  CHECK(w.read("a.bin") != w.read("c.bin"));
  CHECK(fs::exists(w.dir / "a.coarse.trace"));
}

TEST_CASE("usage errors exit with 2") {
  Workspace w;
  auto args = train_args(w, "lc", "m.bin");
  args.resize(args.size() - 4);  // drop --lexicon and --labels
  const auto r = run(args);
  CHECK(r.code == 2);
  CHECK(r.err.find("--lexicon") != std::string::npos);
  CHECK(run({"train", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"train", "--mode", "huge", "--corpus", w.path("toy.tsv")}).code != 0);
  CHECK(run({"xval", "--corpus", w.path("toy.tsv"), "--tagset", w.path("tags.txt"), "--out", w.path("x"), "--k", "2",
             "--folds", w.path("f.txt")})
            .code == 2);
}

TEST_CASE("runtime errors exit with 1") {
  Workspace w;
  w.write("bad.tsv", "maður\n");
  auto args = train_args(w, "baseline", "m.bin");
  args[4] = w.path("bad.tsv");
  const auto r = run(args);
  CHECK(r.code == 1);
  CHECK(r.err.find("line 1") != std::string::npos);

  w.write("junk.bin", "MTAGMODL\x02\0\0\0");
  CHECK(run({"tag", "--model", w.path("junk.bin"), "--input", w.path("toy.tsv")}).code == 1);
}

TEST_CASE("tag preserves sentences and reloads as a corpus") {
  Workspace w;
  REQUIRE(run(train_args(w, "dmii", "m.bin")).code == 0);
  w.write("input.txt", "Hestur\nhleypur\n\nHún\nsá\nbókina\n.\n");
  const auto r = run({"tag", "--model", w.path("m.bin"), "--lexicon", w.path("lexicon.tsv"), "--input",
                      w.path("input.txt"), "--out", w.path("tagged.tsv")});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::istringstream in(w.read("tagged.tsv"));
  const auto tagged = load_corpus(in, RoundRobinFolds{1});
  REQUIRE(tagged.size() == 2);
  CHECK(tagged.sentence(0).tokens.size() == 2);
  CHECK(tagged.sentence(1).tokens.size() == 4);
  CHECK(tagged.sentence(1).tokens[2].form == "bókina");

  w.write("empty.txt", "");
  const auto e = run({"tag", "--model", w.path("m.bin"), "--lexicon", w.path("lexicon.tsv"), "--input",
                      w.path("empty.txt")});
  CHECK(e.code == 0);
  CHECK(e.out.empty());

  CHECK(run({"tag", "--model", w.path("m.bin"), "--input", w.path("input.txt")}).code == 2);
}

TEST_CASE("eval reports accuracy and error reduction") {
  Workspace w;
  const auto perfect = run({"eval", "--corpus", w.path("toy.tsv"), "--input", w.path("toy.tsv"), "--out",
                            w.path("report")});
  REQUIRE_MESSAGE(perfect.code == 0, perfect.err);
  std::istringstream kv(w.read("report.kv"));
  const auto map = read_kv(kv);
  CHECK(std::stod(map.at("accuracy")) == 100.0);
  CHECK(w.read("report.txt").find("100.00") != std::string::npos);

  // 20 tokens with 1 error (95%), baseline 93.84%.
  std::string gold, pred;
  for (int i = 0; i < 20; ++i) {
    gold += "orð" + std::to_string(i) + "\tnken\n";
    pred += "orð" + std::to_string(i) + (i == 0 ? "\tnkeo\n" : "\tnken\n");
  }
  w.write("gold.tsv", gold);
  w.write("pred.tsv", pred);
  const auto er = run({"eval", "--corpus", w.path("gold.tsv"), "--input", w.path("pred.tsv"), "--baseline-acc",
                       "93.84", "--out", w.path("er")});
  REQUIRE(er.code == 0);
  std::istringstream er_kv(w.read("er.kv"));
  const auto er_map = read_kv(er_kv);
  CHECK(std::stod(er_map.at("error_reduction")) == doctest::Approx(error_reduction(93.84, 95.0)));
  CHECK(er_map.at("confusion.nkeo.nken") == "1");

  w.write("short.tsv", "Hestur\tnken\nhleypur\tsfg3en\nhratt\taa\n.\tp\n\nHún\tfpven\n");
  const auto bad = run({"eval", "--corpus", w.path("toy.tsv"), "--input", w.path("short.tsv")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("sentence 2") != std::string::npos);
}

TEST_CASE("error reduction from 93.84 to 95.15 prints 21.3") {
  Workspace w;
  // 2000 tokens, 97 errors: 95.15%.
  std::string gold, pred;
  for (int i = 0; i < 2000; ++i) {
    gold += "w" + std::to_string(i) + "\tnken\n";
    pred += "w" + std::to_string(i) + (i < 97 ? "\tnkeo\n" : "\tnken\n");
    if (i % 10 == 9) gold += "\n", pred += "\n";
  }
  w.write("gold.tsv", gold);
  w.write("pred.tsv", pred);
  const auto r = run({"eval", "--corpus", w.path("gold.tsv"), "--input", w.path("pred.tsv"), "--baseline-acc",
                      "93.84"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("21.3") != std::string::npos);
}

TEST_CASE("xval writes fold reports and a consistent summary") {
  Workspace w;
  const auto start = std::chrono::steady_clock::now();
  const auto r = run({"xval", "--mode", "baseline", "--corpus", w.path("toy.tsv"), "--tagset", w.path("tags.txt"),
                      "--k", "2", "--epochs", "2", "--seed", "3", "--word-dim", "8", "--char-dim", "4",
                      "--char-hidden", "4", "--sentence-hidden", "6", "--ff-hidden", "6", "--jobs", "2", "--out",
                      w.path("xv")});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(60));
  std::istringstream in(w.read("xv/summary.kv"));
  const auto summary = read_kv(in);
  CHECK(summary.at("fold.0.seed") == "3");
  CHECK(summary.at("fold.1.seed") == "4");
  double tokens = 0, correct = 0;
  for (int f = 0; f < 2; ++f) {
    std::istringstream fold_in(w.read("xv/fold" + std::to_string(f) + ".kv"));
    const auto fold = read_kv(fold_in);
    CHECK(fold.at("seed") == std::to_string(3 + f));
    tokens += std::stod(fold.at("total_tokens"));
    correct += std::stod(fold.at("correct_tokens"));
  }
  CHECK(std::stod(summary.at("mean_accuracy")) == doctest::Approx(100.0 * correct / tokens).epsilon(1e-12));
}

TEST_CASE("config file values yield to flags") {
  Workspace w;
  w.write("cfg.json", R"({"word_dim": 5, "epochs": 1, "seed": 99, "char_dim": 3})");
  auto args = train_args(w, "baseline", "m.bin");
  args.push_back("--config");
  args.push_back(w.path("cfg.json"));
  REQUIRE(run(args).code == 0);
  const auto r = run({"inspect", "--model", w.path("m.bin")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("word_dim        8") != std::string::npos);
  CHECK(r.out.find("seed            7") != std::string::npos);
  CHECK(r.out.find("epochs          2") != std::string::npos);

  w.write("broken.json", "{");
  args.back() = w.path("broken.json");
  CHECK(run(args).code == 1);
}
