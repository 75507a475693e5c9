#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "morphtag/tagger.hpp"

namespace morphtag {

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Binary model file, all integers and IEEE-754 doubles little-endian. The
// layout is documented in docs/model-format.md. A stepwise model embeds its
// coarse model as a nested record. Lexicons are not stored; they are attached
// again after loading.
void save_model(const TaggerModel& model, std::ostream& out);
void save_model(const TaggerModel& model, const std::filesystem::path& path);

/// Throws ModelFormatError, or VersionMismatch for files of another version.
TaggerModel load_model(std::istream& in);
TaggerModel load_model(const std::filesystem::path& path);

}  // namespace morphtag
