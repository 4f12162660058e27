#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "image.hpp"

namespace eyespot {

/// Decodes PNG, binary PPM (P6), or binary PGM (P5); the format is sniffed
/// from the leading bytes. PGM samples are expanded to gray RGB triplets.
ImageRgb load_image(const std::string& path);

void save_png(const ImageRgb& img, const std::string& path);

/// 8-bit grayscale PNG from raw bytes (used for kernel previews).
void save_png_gray(const std::vector<std::uint8_t>& bytes, int width, int height,
                   const std::string& path);

/// Binary PGM with 0/255 samples.
void save_pgm(const std::vector<std::uint8_t>& bytes, int width, int height,
              const std::string& path);

} // namespace eyespot
