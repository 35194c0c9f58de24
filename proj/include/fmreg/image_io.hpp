#pragma once

#include <filesystem>
#include <string_view>

#include "fmreg/grid.hpp"

namespace fmreg::io {

/// Loads PGM (P2/P5, 8 or 16 bit) or PNG (gray, gray+alpha, RGB, RGBA,
/// palette; 8 or 16 bit). Color is reduced to luminance with BT.709 weights
/// 0.2126 R + 0.7152 G + 0.0722 B on the stored code values; samples are
/// divided by the format maximum so they lie in [0, 1]. Throws IoError.
Image load_image(const std::filesystem::path& path);

/// Writes a binary PGM. Samples are clipped to [0, 1] and quantized to
/// `bits` (8 or 16). The file appears atomically or not at all.
void save_pgm(const std::filesystem::path& path, const Image& img, int bits = 8);

/// Writes an 8-bit grayscale PNG with the same clipping and atomicity.
void save_png(const std::filesystem::path& path, const Image& img);

/// Dispatches on extension: ".png" writes PNG, anything else 16-bit PGM.
void save_image(const std::filesystem::path& path, const Image& img);

/// Writes text with the same all-or-nothing behavior.
void save_text(const std::filesystem::path& path, std::string_view text);

}  // namespace fmreg::io
