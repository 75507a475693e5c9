#include "morphtag/tagset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "morphtag/errors.hpp"
#include "morphtag/utf8.hpp"

namespace morphtag {

MnemonicTag::MnemonicTag(std::string_view raw) : raw_(raw) {
  if (raw.empty()) throw EmptyTag("empty tag");
  const std::u32string cps = utf8::decode(raw);
  if (cps.size() > kMaxLength) {
    throw TagTooLong("tag '" + raw_ + "' has " + std::to_string(cps.size()) +
                     " characters, at most " + std::to_string(kMaxLength) + " allowed");
  }
  category_ = cps.front();
}

std::string MnemonicTag::category_string() const { return utf8::encode(category_); }

MnemonicTag parse_tag(std::string_view raw) { return MnemonicTag(raw); }

char32_t coarse_of(const MnemonicTag& tag) { return tag.category(); }

TagInventory TagInventory::build(std::span<const std::string> tags) {
  if (tags.empty()) throw EmptyTagsetError("tagset contains no tags");
  std::vector<MnemonicTag> parsed;
  parsed.reserve(tags.size());
  for (const auto& t : tags) parsed.push_back(parse_tag(t));
  std::sort(parsed.begin(), parsed.end());
  parsed.erase(std::unique(parsed.begin(), parsed.end()), parsed.end());

  TagInventory inv;
  inv.tags_ = std::move(parsed);
  for (std::size_t i = 0; i < inv.tags_.size(); ++i) inv.index_.emplace(inv.tags_[i].raw(), i);
  return inv;
}

std::optional<std::size_t> TagInventory::find(std::string_view tag) const {
  auto it = index_.find(std::string(tag));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TagInventory::index_of(std::string_view tag) const {
  if (auto idx = find(tag)) return *idx;
  throw UnknownTag("tag '" + std::string(tag) + "' is not in the inventory");
}

CoarseInventory CoarseInventory::build(const TagInventory& fine) {
  CoarseInventory inv;
  for (const auto& tag : fine.tags()) inv.categories_.push_back(coarse_of(tag));
  std::sort(inv.categories_.begin(), inv.categories_.end());
  inv.categories_.erase(std::unique(inv.categories_.begin(), inv.categories_.end()),
                        inv.categories_.end());
  return inv;
}

std::optional<std::size_t> CoarseInventory::find(char32_t category) const {
  auto it = std::lower_bound(categories_.begin(), categories_.end(), category);
  if (it == categories_.end() || *it != category) return std::nullopt;
  return static_cast<std::size_t>(it - categories_.begin());
}

std::size_t CoarseInventory::index_of(char32_t category) const {
  if (auto idx = find(category)) return *idx;
  throw UnknownTag("category '" + utf8::encode(category) + "' is not in the coarse inventory");
}

TagInventory CoarseInventory::as_tag_inventory() const {
  std::vector<std::string> tags;
  tags.reserve(categories_.size());
  for (char32_t c : categories_) tags.push_back(utf8::encode(c));
  return TagInventory::build(tags);
}

TagInventory read_tagset(std::istream& in) {
  std::vector<std::string> tags;
  std::string line;
  while (std::getline(in, line)) tags.emplace_back(utf8::trim_right(line));
  return TagInventory::build(tags);
}

TagInventory load_tagset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open tagset file " + path.string());
  return read_tagset(in);
}

}  // namespace morphtag
