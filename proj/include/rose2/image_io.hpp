#pragma once

#include "rose2/types.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>

namespace rose2::io {

/// Reads an 8-bit grayscale raster from binary PGM (P5) or PNG. Color PNGs
/// are converted to luminance.
Raster<std::uint8_t> read_gray(const std::filesystem::path& path);

void write_pgm(const Raster<std::uint8_t>& gray, const std::filesystem::path& path);
void write_gray_png(const Raster<std::uint8_t>& gray, const std::filesystem::path& path);
/// `rgb` is height x (3 * width), interleaved.
void write_rgb_png(const Raster<std::uint8_t>& rgb, const std::filesystem::path& path);
void write_indexed_png(const Raster<std::uint8_t>& indices,
                       std::span<const std::array<std::uint8_t, 3>> palette,
                       const std::filesystem::path& path);
/// Palette PNGs yield raw indices, grayscale PNGs their gray values.
Raster<std::uint8_t> read_index_png(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace rose2::io
