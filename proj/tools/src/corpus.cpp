#include "mrmap_tools/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mrmap/samplers.hpp"

namespace mrmap_tools {

using mrmap::Matrix;
using mrmap::RngStream;

namespace {

void draw_bar(RngStream& rng, double* px) {
  const bool vertical = rng.next_below(2) == 1;
  const int pos = static_cast<int>(rng.next_below(kImageSide));
  const int thickness = 1 + static_cast<int>(rng.next_below(3));
  const double fg = 0.6 + 0.4 * rng.next_double();
  const double bg = 0.15 * rng.next_double();
  for (int y = 0; y < kImageSide; ++y)
    for (int x = 0; x < kImageSide; ++x) {
      const int along = vertical ? x : y;
      const bool hit = along >= pos && along < pos + thickness;
      px[y * kImageSide + x] = hit ? fg : bg;
    }
}

void draw_disc(RngStream& rng, double* px) {
  const double cx = 1.5 + 5.0 * rng.next_double();
  const double cy = 1.5 + 5.0 * rng.next_double();
  const double r = 1.5 + 2.0 * rng.next_double();
  const double fg = 0.6 + 0.4 * rng.next_double();
  const double bg = 0.15 * rng.next_double();
  for (int y = 0; y < kImageSide; ++y)
    for (int x = 0; x < kImageSide; ++x) {
      const double dx = x - cx, dy = y - cy;
      px[y * kImageSide + x] = (dx * dx + dy * dy <= r * r) ? fg : bg;
    }
}

void draw_gradient(RngStream& rng, double* px) {
  const double angle = 2.0 * M_PI * rng.next_double();
  const double scale = (0.5 + rng.next_double()) / 7.0;
  const double dx = std::cos(angle), dy = std::sin(angle);
  for (int y = 0; y < kImageSide; ++y)
    for (int x = 0; x < kImageSide; ++x) {
      const double t = 0.5 + scale * (dx * (x - 3.5) + dy * (y - 3.5));
      px[y * kImageSide + x] = std::clamp(t, 0.0, 1.0);
    }
}

}  // namespace

Matrix make_image_corpus(int n, uint64_t seed, uint64_t index_offset) {
  if (n < 0) throw std::invalid_argument("make_image_corpus: negative count");
  Matrix out(kImagePixels, n);
  std::vector<double> px(kImagePixels);
  for (int i = 0; i < n; ++i) {
    RngStream rng(seed, index_offset + static_cast<uint64_t>(i));
    switch (i % 3) {
      case 0: draw_bar(rng, px.data()); break;
      case 1: draw_disc(rng, px.data()); break;
      default: draw_gradient(rng, px.data()); break;
    }
    for (int row = 0; row < kImagePixels; ++row) out(row, i) = px[row];
  }
  return out;
}

Matrix image_from_column(const Matrix& data, int c) {
  if (data.rows != kImagePixels || c < 0 || c >= data.cols)
    throw std::invalid_argument("image_from_column: bad shape or index");
  Matrix img(kImageSide, kImageSide);
  for (int y = 0; y < kImageSide; ++y)
    for (int x = 0; x < kImageSide; ++x) img(y, x) = data(y * kImageSide + x, c);
  return img;
}

}  // namespace mrmap_tools
