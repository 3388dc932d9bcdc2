#include "pelflow/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pelflow {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw ParameterError("frame dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
}

}  // namespace

Frame::Frame(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  check_dims(width, height);
  samples_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  check_dims(width, height);
  if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ParameterError("frame sample count " + std::to_string(samples_.size()) + " does not match " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
}

Sequence::Sequence(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.size() < 2) {
    throw ParameterError("a sequence needs at least two frames, got " + std::to_string(frames_.size()));
  }
  const auto& first = frames_.front();
  for (std::size_t k = 1; k < frames_.size(); ++k) {
    if (frames_[k].width() != first.width() || frames_[k].height() != first.height()) {
      throw ParameterError("frame " + std::to_string(k) + " is " + std::to_string(frames_[k].width()) + "x" +
                           std::to_string(frames_[k].height()) + ", expected " + std::to_string(first.width()) +
                           "x" + std::to_string(first.height()));
    }
  }
}

FlowField::FlowField(int width, int height, Vec2 fill) : width_(width), height_(height) {
  check_dims(width, height);
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  dx_.assign(n, fill.x);
  dy_.assign(n, fill.y);
}

bool FlowField::finite() const {
  auto is_finite = [](double v) { return std::isfinite(v); };
  return std::all_of(dx_.begin(), dx_.end(), is_finite) && std::all_of(dy_.begin(), dy_.end(), is_finite);
}

}  // namespace pelflow
