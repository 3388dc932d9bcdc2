#include "pelflow/interp.hpp"

#include <fmt/format.h>

namespace pelflow {

GradientField::GradientField(int width, int height, std::vector<double> gx, std::vector<double> gy)
    : width_(width), height_(height), gx_(std::move(gx)), gy_(std::move(gy)) {
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (width < 1 || height < 1 || gx_.size() != n || gy_.size() != n) {
    throw ParameterError(fmt::format("gradient channels do not match {}x{}", width, height));
  }
}

GradientField gradient_field(const Frame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  if (w < 2 || h < 2) throw ParameterError(fmt::format("gradient needs a frame of at least 2x2, got {}x{}", w, h));
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> gx(n), gy(n);
  auto I = [&](int x, int y) { return static_cast<double>(frame.at(x, y)); };
  // central differences over a replicated border: at the edges this is half
  // the one-sided difference
  for (int y = 0; y < h; ++y) {
    const int up = std::max(y - 1, 0);
    const int down = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int left = std::max(x - 1, 0);
      const int right = std::min(x + 1, w - 1);
      const auto i = static_cast<std::size_t>(y) * w + x;
      gx[i] = 0.5 * (I(right, y) - I(left, y));
      gy[i] = 0.5 * (I(x, down) - I(x, up));
    }
  }
  return GradientField(w, h, std::move(gx), std::move(gy));
}

}  // namespace pelflow
