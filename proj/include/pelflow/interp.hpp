#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pelflow/frame.hpp"

namespace pelflow {

/// Central-difference spatial derivatives of one frame, row-major. Border
/// samples are replicated, so an edge derivative is half the one-sided
/// difference.
class GradientField {
public:
  GradientField(int width, int height, std::vector<double> gx, std::vector<double> gy);

  int width() const { return width_; }
  int height() const { return height_; }
  Vec2 at(int x, int y) const {
    const auto i = static_cast<std::size_t>(y) * width_ + x;
    return {gx_[i], gy_[i]};
  }
  std::span<const double> gx() const { return gx_; }
  std::span<const double> gy() const { return gy_; }

private:
  int width_;
  int height_;
  std::vector<double> gx_;
  std::vector<double> gy_;
};

namespace detail {

// Bilinear blend of a row-major grid at (x, y) with coordinates clamped to
// the valid rectangle.
template <typename Get>
double bilinear(int width, int height, double x, double y, Get&& get) {
  x = std::clamp(x, 0.0, static_cast<double>(width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = get(x0, y0) + fx * (get(x1, y0) - get(x0, y0));
  const double bottom = get(x0, y1) + fx * (get(x1, y1) - get(x0, y1));
  return top + fy * (bottom - top);
}

}  // namespace detail

/// Bilinear intensity at real coordinates; exact on the integer grid and
/// clamped outside the frame.
inline double bilinear_sample(const Frame& frame, double x, double y) {
  return detail::bilinear(frame.width(), frame.height(), x, y,
                          [&](int xi, int yi) { return static_cast<double>(frame.at(xi, yi)); });
}

/// Throws ParameterError when either dimension is below 2.
GradientField gradient_field(const Frame& frame);

/// Channel-wise bilinear interpolation of a gradient field.
inline Vec2 sample_gradient(const GradientField& g, double x, double y) {
  const auto gx = g.gx();
  const auto gy = g.gy();
  const int w = g.width();
  return {detail::bilinear(w, g.height(), x, y, [&](int xi, int yi) { return gx[static_cast<std::size_t>(yi) * w + xi]; }),
          detail::bilinear(w, g.height(), x, y, [&](int xi, int yi) { return gy[static_cast<std::size_t>(yi) * w + xi]; })};
}

/// Displaced frame difference cur(r) - prev(r - d).
inline double dfd(const Frame& cur, const Frame& prev, Pixel r, Vec2 d) {
  return static_cast<double>(cur.at(r.x, r.y)) - bilinear_sample(prev, r.x - d.x, r.y - d.y);
}

}  // namespace pelflow
