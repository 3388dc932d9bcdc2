#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pelflow/error.hpp"

namespace pelflow {

/// Integer pixel position; x is the column (rightward), y the row (downward).
struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Real-valued displacement in pixels, same axis convention as Pixel.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }

/// Single 8-bit grayscale image stored row-major.
class Frame {
public:
  Frame() = default;
  Frame(int width, int height, std::uint8_t fill = 0);
  Frame(int width, int height, std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  std::uint8_t at(int x, int y) const { return samples_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return samples_[index(x, y)]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> samples() { return samples_; }

  friend bool operator==(const Frame&, const Frame&) = default;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

/// Ordered frames sharing one size; at least two.
class Sequence {
public:
  explicit Sequence(std::vector<Frame> frames);

  std::size_t size() const { return frames_.size(); }
  const Frame& operator[](std::size_t k) const { return frames_[k]; }
  const std::vector<Frame>& frames() const { return frames_; }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }

  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }

private:
  std::vector<Frame> frames_;
};

/// Dense per-pixel displacement map, row-major.
class FlowField {
public:
  FlowField() = default;
  FlowField(int width, int height, Vec2 fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return dx_.size(); }

  Vec2 at(int x, int y) const {
    const auto i = index(x, y);
    return {dx_[i], dy_[i]};
  }
  void set(int x, int y, Vec2 d) {
    const auto i = index(x, y);
    dx_[i] = d.x;
    dy_[i] = d.y;
  }

  std::span<const double> dx() const { return dx_; }
  std::span<const double> dy() const { return dy_; }
  std::span<double> dx() { return dx_; }
  std::span<double> dy() { return dy_; }

  bool same_shape(const FlowField& o) const { return width_ == o.width_ && height_ == o.height_; }
  /// True when every component is finite.
  bool finite() const;

  friend bool operator==(const FlowField&, const FlowField&) = default;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> dx_;
  std::vector<double> dy_;
};

}  // namespace pelflow
