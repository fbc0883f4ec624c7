#pragma once

#include <filesystem>
#include <string_view>

#include <tcdm/types.hpp>

namespace tcdm {

enum class PlyEncoding { ascii, binary_le };

/// Reads the `vertex` element of an ASCII or binary little-endian PLY file.
///
/// Requires x, y, z and red, green, blue properties (any scalar type; colors
/// must fall in [0, 255]). Unknown vertex properties are skipped. Elements
/// declared after `vertex` are ignored. Big-endian payloads are rejected.
/// Errors are reported as InputError naming the file and the failing line or
/// vertex.
PointCloud load_ply(const std::filesystem::path& path);

/// Parses PLY bytes already in memory; `origin` only labels error messages.
PointCloud parse_ply(std::string_view bytes, std::string_view origin = "<memory>");

/// Writes `double x, y, z` and `uchar red, green, blue` (or `double` colors
/// when any channel is fractional). ASCII uses 17 significant digits, so both
/// encodings round-trip exactly.
void save_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyEncoding encoding);

}  // namespace tcdm
