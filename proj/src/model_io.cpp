#include "morphtag/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "morphtag/errors.hpp"

namespace morphtag {

namespace {

constexpr std::array<char, 8> kMagic{'M', 'T', 'A', 'G', 'M', 'O', 'D', 'L'};
// Guards against absurd allocations from corrupt length fields.
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 32;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { little(v, 4); }
  void u64(std::uint64_t v) { little(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  void little(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(little(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little(4)); }
  std::uint64_t u64() { return little(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t count() {
    const std::uint64_t n = u32();
    if (n >= kMaxCount) throw ModelFormatError("corrupt length field in model file");
    return static_cast<std::size_t>(n);
  }
  std::string str() {
    std::string s(count(), '\0');
    in_.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!in_) throw ModelFormatError("model file is truncated");
    return s;
  }
  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (!in_) throw ModelFormatError("model file is truncated");
  }

 private:
  std::uint64_t little(int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) throw ModelFormatError("model file is truncated");
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
  }
  std::istream& in_;
};

void write_config(Writer& w, const ModelConfig& c) {
  w.u8(static_cast<std::uint8_t>(c.mode));
  w.u64(c.seed);
  for (std::size_t d : {c.word_dim, c.char_dim, c.char_hidden, c.sentence_hidden, c.ff_hidden, c.lexicon_dim,
                        c.coarse_dim}) {
    w.u32(static_cast<std::uint32_t>(d));
  }
  w.i32(c.epochs);
  w.f64(c.base_rate);
  w.f64(c.decay);
  w.u8(c.gold_coarse_hints ? 1 : 0);
  w.u8(c.learn_coarse_embedding ? 1 : 0);
}

ModelConfig read_config(Reader& r) {
  ModelConfig c;
  const std::uint8_t mode = r.u8();
  if (mode > static_cast<std::uint8_t>(Mode::WithLexiconAndCoarse)) throw ModelFormatError("unknown model mode");
  c.mode = static_cast<Mode>(mode);
  c.seed = r.u64();
  for (std::size_t* d : {&c.word_dim, &c.char_dim, &c.char_hidden, &c.sentence_hidden, &c.ff_hidden,
                         &c.lexicon_dim, &c.coarse_dim}) {
    *d = r.u32();
  }
  c.epochs = r.i32();
  c.base_rate = r.f64();
  c.decay = r.f64();
  c.gold_coarse_hints = r.u8() != 0;
  c.learn_coarse_embedding = r.u8() != 0;
  return c;
}

void write_record(Writer& w, const TaggerModel& m) {
  write_config(w, m.config());

  w.u32(static_cast<std::uint32_t>(m.tags().size()));
  for (const auto& t : m.tags().tags()) w.str(t.raw());

  w.u8(m.labels() ? 1 : 0);
  if (m.labels()) {
    w.u32(static_cast<std::uint32_t>(m.labels()->size()));
    for (const auto& l : m.labels()->labels()) w.str(l);
  }

  w.u32(static_cast<std::uint32_t>(m.vocab().words().size()));
  for (const auto& word : m.vocab().words()) w.str(word);
  w.u32(static_cast<std::uint32_t>(m.vocab().chars().size()));
  for (char32_t c : m.vocab().chars()) w.u32(static_cast<std::uint32_t>(c));

  const auto& params = m.parameters().params();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.str(p.name);
    w.u32(static_cast<std::uint32_t>(p.value.rank()));
    for (auto e : p.value.shape()) w.u64(e);
    for (double v : p.value.data()) w.f64(v);
  }

  w.u8(m.coarse_model() ? 1 : 0);
  if (m.coarse_model()) write_record(w, *m.coarse_model());
}

TaggerModel read_record(Reader& r, int depth) {
  if (depth > 1) throw ModelFormatError("model file nests coarse models too deeply");
  const ModelConfig config = read_config(r);

  std::vector<std::string> tags(r.count());
  for (auto& t : tags) t = r.str();
  if (tags.empty()) throw ModelFormatError("model file has an empty tag inventory");
  TagInventory inventory = TagInventory::build(tags);
  if (inventory.size() != tags.size()) throw ModelFormatError("model file repeats tags");

  std::optional<LabelInventory> labels;
  if (r.u8() != 0) {
    std::vector<std::string> names(r.count());
    for (auto& l : names) l = r.str();
    labels = LabelInventory(std::move(names));
  }

  std::vector<std::string> words(r.count());
  for (auto& word : words) word = r.str();
  std::u32string chars(r.count(), U'\0');
  for (auto& c : chars) c = static_cast<char32_t>(r.u32());
  Vocabulary vocab = Vocabulary::from_items(std::move(words), std::move(chars));

  ParameterStore store;
  const std::size_t n_params = r.count();
  for (std::size_t i = 0; i < n_params; ++i) {
    std::string name = r.str();
    std::vector<std::size_t> shape(r.count());
    std::uint64_t volume = 1;
    for (auto& e : shape) {
      const std::uint64_t extent = r.u64();
      if (extent == 0 || extent >= kMaxCount) throw ModelFormatError("corrupt tensor shape for '" + name + "'");
      e = static_cast<std::size_t>(extent);
      volume *= extent;
      if (volume >= kMaxCount) throw ModelFormatError("tensor '" + name + "' is implausibly large");
    }
    if (shape.empty()) throw ModelFormatError("tensor '" + name + "' has no shape");
    const ParamId id = store.add(std::move(name), shape);
    for (double& v : store.at(id).value.data()) v = r.f64();
  }

  TaggerModel model(config, std::move(inventory), std::move(vocab), std::move(labels), std::move(store));
  if (r.u8() != 0) {
    model.set_coarse_model(std::make_unique<TaggerModel>(read_record(r, depth + 1)));
  } else if (config.mode == Mode::WithLexiconAndCoarse) {
    throw ModelFormatError("stepwise model file lacks its coarse model");
  }
  return model;
}

}  // namespace

void save_model(const TaggerModel& model, std::ostream& out) {
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.u32(kModelFormatVersion);
  write_record(w, model);
  if (!out) throw FileError("failed to write model");
}

void save_model(const TaggerModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot open " + path.string() + " for writing");
  save_model(model, out);
}

TaggerModel load_model(std::istream& in) {
  Reader r(in);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw ModelFormatError("not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw VersionMismatch("model format version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kModelFormatVersion) + ")");
  }
  try {
    return read_record(r, 0);
  } catch (const ModelFormatError&) {
    throw;
  } catch (const Error& e) {
    throw ModelFormatError(std::string("invalid model file: ") + e.what());
  }
}

TaggerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open model file " + path.string());
  return load_model(in);
}

}  // namespace morphtag
