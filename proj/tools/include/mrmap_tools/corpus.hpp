#pragma once

#include <cstdint>

#include "mrmap/linalg.hpp"

namespace mrmap_tools {

inline constexpr int kImageSide = 8;
inline constexpr int kImagePixels = kImageSide * kImageSide;

/// Procedural 8x8 grayscale corpus: bars, discs and linear gradients in
/// rotation, values in [0, 1]. One column per image, pixels row-major.
/// Image i is a pure function of (seed, index_offset + i), so disjoint
/// offsets give independent train/test splits.
mrmap::Matrix make_image_corpus(int n, uint64_t seed, uint64_t index_offset = 0);

/// Column c reshaped to an 8x8 matrix for PGM output.
mrmap::Matrix image_from_column(const mrmap::Matrix& data, int c);

}  // namespace mrmap_tools
