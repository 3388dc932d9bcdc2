#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "pelflow/frame.hpp"

namespace pelflow {

/// How the AR texture variance parameter is interpreted. `field` rescales
/// the finished field to the requested sample variance. `innovation` uses
/// it as the variance of the driving noise and only adds the mean; the
/// unit-root recursion then yields a much rougher, higher-variance field.
enum class TextureScaling { field, innovation };

std::string_view to_string(TextureScaling s);
TextureScaling parse_texture_scaling(std::string_view name);

/// Moving textured rectangle over a moving textured background.
/// Displacements are integer pixels per frame.
struct RectSceneParams {
  int width = 176;
  int height = 144;
  int rect_x = 68;
  int rect_y = 52;
  int rect_width = 40;
  int rect_height = 40;
  int background_dx = 2;
  int background_dy = 0;
  int rect_dx = 1;
  int rect_dy = 2;
  double background_mean = 50.0;
  double background_variance = 49.0;
  double rect_mean = 100.0;
  double rect_variance = 25.0;
  int frames = 2;
  std::uint64_t seed = 1;
  TextureScaling texture_scaling = TextureScaling::innovation;

  /// Throws ParameterError when the scene cannot be generated.
  void validate() const;
};

struct SyntheticSequence {
  Sequence frames;
  /// truth[k] maps pixels of frame k+1 back to frame k.
  std::vector<FlowField> truth;
};

/// Texture from the causal recursion
///   I(m,n) = (I(m,n-1) + I(m-1,n) + I(m-1,n-1)) / 3 + e(m,n)
/// driven by zero-mean Gaussian innovations, with the first row and column
/// drawn i.i.d., then offset and scaled per `scaling`, rounded and clamped
/// to [0, 255].
Frame gen_ar_texture(int rows, int cols, double mean, double variance, std::uint64_t seed,
                     TextureScaling scaling = TextureScaling::field);

/// Same texture before quantization. With field scaling the sample mean and
/// variance match the request exactly.
std::vector<double> ar_texture_field(int rows, int cols, double mean, double variance, std::uint64_t seed,
                                     TextureScaling scaling = TextureScaling::field);

SyntheticSequence gen_rect_sequence(const RectSceneParams& params);

/// Adds i.i.d. Gaussian noise of variance var(frame) / 10^(snr_db/10).
/// An infinite SNR returns the frame unchanged. Throws ParameterError on a
/// constant frame.
Frame add_noise(const Frame& frame, double snr_db, std::uint64_t seed);

/// Applies add_noise to every frame with per-frame derived seeds.
Sequence add_noise(const Sequence& seq, double snr_db, std::uint64_t seed);

/// 10 log10(var(clean) / var(noisy - clean)).
double measured_snr_db(const Frame& clean, const Frame& noisy);

double sample_mean(const Frame& frame);
/// Population variance of the samples.
double sample_variance(const Frame& frame);

}  // namespace pelflow
