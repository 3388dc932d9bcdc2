#include "pelflow/synth.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pelflow/rng.hpp"

namespace pelflow {

namespace {

std::uint8_t quantize(double v) { return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0)); }

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

template <typename Range>
Moments moments(const Range& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    sum += v;
    ++n;
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, ss / static_cast<double>(n)};
}

}  // namespace

void RectSceneParams::validate() const {
  if (width < 2 || height < 2) throw ParameterError(fmt::format("scene size {}x{} too small", width, height));
  if (frames < 2) throw ParameterError(fmt::format("frame count must be at least 2, got {}", frames));
  if (rect_width < 1 || rect_height < 1) {
    throw ParameterError(fmt::format("rectangle size {}x{} must be positive", rect_width, rect_height));
  }
  if (background_variance < 0.0 || rect_variance < 0.0) throw ParameterError("texture variances must be >= 0");
  for (int k = 0; k < frames; ++k) {
    const int x0 = rect_x + k * rect_dx;
    const int y0 = rect_y + k * rect_dy;
    if (x0 < 0 || y0 < 0 || x0 + rect_width > width || y0 + rect_height > height) {
      throw ParameterError(fmt::format("rectangle leaves the frame at frame {} (origin {},{})", k + 1, x0, y0));
    }
  }
}

std::string_view to_string(TextureScaling s) { return s == TextureScaling::field ? "field" : "innovation"; }

TextureScaling parse_texture_scaling(std::string_view name) {
  if (name == "field") return TextureScaling::field;
  if (name == "innovation") return TextureScaling::innovation;
  throw ParameterError(fmt::format("unknown texture scaling '{}'", name));
}

std::vector<double> ar_texture_field(int rows, int cols, double mean, double variance, std::uint64_t seed,
                                     TextureScaling scaling) {
  if (rows < 1 || cols < 1) throw ParameterError(fmt::format("texture size {}x{} must be positive", rows, cols));
  if (!(variance >= 0.0)) throw ParameterError("texture variance must be >= 0");
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<double> field(n, 0.0);
  if (variance == 0.0) {
    std::fill(field.begin(), field.end(), mean);
    return field;
  }
  GaussianRng rng(seed);
  const double sd = std::sqrt(variance);
  auto at = [&](int m, int k) -> double& { return field[static_cast<std::size_t>(m) * cols + k]; };
  for (int m = 0; m < rows; ++m) {
    for (int k = 0; k < cols; ++k) {
      const double innovation = rng.normal(0.0, sd);
      if (m == 0 || k == 0) {
        at(m, k) = innovation;
      } else {
        at(m, k) = (at(m, k - 1) + at(m - 1, k) + at(m - 1, k - 1)) / 3.0 + innovation;
      }
    }
  }
  if (scaling == TextureScaling::innovation) {
    for (double& v : field) v += mean;
    return field;
  }
  // The recursion has a unit root, so its raw variance grows with the field
  // size; normalize to the requested moments.
  const auto raw = moments(field);
  const double scale = raw.variance > 0.0 ? std::sqrt(variance / raw.variance) : 0.0;
  for (double& v : field) v = mean + (v - raw.mean) * scale;
  return field;
}

Frame gen_ar_texture(int rows, int cols, double mean, double variance, std::uint64_t seed,
                     TextureScaling scaling) {
  const auto field = ar_texture_field(rows, cols, mean, variance, seed, scaling);
  std::vector<std::uint8_t> samples(field.size());
  std::transform(field.begin(), field.end(), samples.begin(), quantize);
  return Frame(cols, rows, std::move(samples));
}

SyntheticSequence gen_rect_sequence(const RectSceneParams& p) {
  p.validate();
  const int span_x = std::abs(p.background_dx) * (p.frames - 1);
  const int span_y = std::abs(p.background_dy) * (p.frames - 1);
  const int canvas_w = p.width + span_x;
  const int canvas_h = p.height + span_y;
  const auto canvas = ar_texture_field(canvas_h, canvas_w, p.background_mean, p.background_variance,
                                       derive_seed(p.seed, 0), p.texture_scaling);
  const auto rect = ar_texture_field(p.rect_height, p.rect_width, p.rect_mean, p.rect_variance,
                                     derive_seed(p.seed, 1), p.texture_scaling);
  // Frame k shows the canvas through a window that moves against the
  // background motion, so frame_k(r) = frame_{k-1}(r - d_b).
  const int origin_x = p.background_dx > 0 ? span_x : 0;
  const int origin_y = p.background_dy > 0 ? span_y : 0;

  auto in_rect = [&](int k, int x, int y) {
    const int x0 = p.rect_x + k * p.rect_dx;
    const int y0 = p.rect_y + k * p.rect_dy;
    return x >= x0 && y >= y0 && x < x0 + p.rect_width && y < y0 + p.rect_height;
  };

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(p.frames));
  for (int k = 0; k < p.frames; ++k) {
    Frame f(p.width, p.height);
    const int wx = origin_x - k * p.background_dx;
    const int wy = origin_y - k * p.background_dy;
    for (int y = 0; y < p.height; ++y) {
      for (int x = 0; x < p.width; ++x) {
        double v;
        if (in_rect(k, x, y)) {
          const int rx = x - (p.rect_x + k * p.rect_dx);
          const int ry = y - (p.rect_y + k * p.rect_dy);
          v = rect[static_cast<std::size_t>(ry) * p.rect_width + rx];
        } else {
          v = canvas[static_cast<std::size_t>(y + wy) * canvas_w + (x + wx)];
        }
        f.at(x, y) = quantize(v);
      }
    }
    frames.push_back(std::move(f));
  }

  std::vector<FlowField> truth;
  const Vec2 db{static_cast<double>(p.background_dx), static_cast<double>(p.background_dy)};
  const Vec2 dr{static_cast<double>(p.rect_dx), static_cast<double>(p.rect_dy)};
  for (int k = 1; k < p.frames; ++k) {
    FlowField flow(p.width, p.height, db);
    for (int y = 0; y < p.height; ++y) {
      for (int x = 0; x < p.width; ++x) {
        if (in_rect(k, x, y)) flow.set(x, y, dr);
      }
    }
    truth.push_back(std::move(flow));
  }
  return {Sequence(std::move(frames)), std::move(truth)};
}

double sample_mean(const Frame& frame) {
  double sum = 0.0;
  for (auto v : frame.samples()) sum += v;
  return sum / static_cast<double>(frame.size());
}

double sample_variance(const Frame& frame) {
  const double mean = sample_mean(frame);
  double ss = 0.0;
  for (auto v : frame.samples()) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(frame.size());
}

Frame add_noise(const Frame& frame, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return frame;
  if (std::isnan(snr_db)) throw ParameterError("SNR must not be NaN");
  const double signal = sample_variance(frame);
  if (signal == 0.0) throw ParameterError("SNR is undefined for a constant frame");
  const double sd = std::sqrt(signal / std::pow(10.0, snr_db / 10.0));
  GaussianRng rng(seed);
  Frame out(frame.width(), frame.height());
  auto src = frame.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = quantize(src[i] + rng.normal(0.0, sd));
  return out;
}

Sequence add_noise(const Sequence& seq, double snr_db, std::uint64_t seed) {
  std::vector<Frame> frames;
  frames.reserve(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) frames.push_back(add_noise(seq[k], snr_db, derive_seed(seed, 100 + k)));
  return Sequence(std::move(frames));
}

double measured_snr_db(const Frame& clean, const Frame& noisy) {
  if (clean.width() != noisy.width() || clean.height() != noisy.height()) {
    throw ParameterError("measured_snr_db: frame sizes differ");
  }
  std::vector<double> diff(clean.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = static_cast<double>(noisy.samples()[i]) - static_cast<double>(clean.samples()[i]);
  }
  const auto noise = moments(diff);
  return 10.0 * std::log10(sample_variance(clean) / noise.variance);
}

}  // namespace pelflow
