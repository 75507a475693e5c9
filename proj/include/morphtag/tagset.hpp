#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace morphtag {

// A fine-grained mnemonic tag such as "nken". The first code point is the
// lexical category; the remaining ones (at most six) encode features. Only the
// structure is validated, the inventory file decides which tags exist.
class MnemonicTag {
 public:
  static constexpr std::size_t kMaxLength = 7;

  explicit MnemonicTag(std::string_view raw);

  const std::string& raw() const { return raw_; }
  char32_t category() const { return category_; }
  std::string category_string() const;

  friend bool operator==(const MnemonicTag&, const MnemonicTag&) = default;
  friend auto operator<=>(const MnemonicTag& a, const MnemonicTag& b) { return a.raw_ <=> b.raw_; }

 private:
  std::string raw_;
  char32_t category_;
};

/// Throws EmptyTag or TagTooLong.
MnemonicTag parse_tag(std::string_view raw);

char32_t coarse_of(const MnemonicTag& tag);

// Closed tagset with a bijective tag <-> index mapping in lexicographic order.
class TagInventory {
 public:
  TagInventory() = default;

  /// Deduplicates and sorts. Throws EmptyTagsetError when `tags` is empty and
  /// propagates parse errors for malformed tags.
  static TagInventory build(std::span<const std::string> tags);

  std::size_t size() const { return tags_.size(); }
  bool empty() const { return tags_.empty(); }
  const MnemonicTag& at(std::size_t index) const { return tags_.at(index); }
  const std::vector<MnemonicTag>& tags() const { return tags_; }

  std::optional<std::size_t> find(std::string_view tag) const;
  bool contains(std::string_view tag) const { return find(tag).has_value(); }
  /// Throws UnknownTag.
  std::size_t index_of(std::string_view tag) const;

  friend bool operator==(const TagInventory& a, const TagInventory& b) { return a.tags_ == b.tags_; }

 private:
  std::vector<MnemonicTag> tags_;
  std::unordered_map<std::string, std::size_t> index_;
};

// The lexical-category projection of a fine inventory.
class CoarseInventory {
 public:
  CoarseInventory() = default;

  static CoarseInventory build(const TagInventory& fine);

  std::size_t size() const { return categories_.size(); }
  char32_t at(std::size_t index) const { return categories_.at(index); }
  const std::vector<char32_t>& categories() const { return categories_; }

  std::optional<std::size_t> find(char32_t category) const;
  std::size_t index_of(char32_t category) const;

  /// The categories as single-character tags. Indices coincide with this
  /// inventory's because UTF-8 byte order equals code point order.
  TagInventory as_tag_inventory() const;

  friend bool operator==(const CoarseInventory& a, const CoarseInventory& b) {
    return a.categories_ == b.categories_;
  }

 private:
  std::vector<char32_t> categories_;
};

/// One tag per line; trailing whitespace trimmed.
TagInventory read_tagset(std::istream& in);
TagInventory load_tagset(const std::filesystem::path& path);

}  // namespace morphtag
