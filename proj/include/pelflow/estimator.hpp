#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pelflow/frame.hpp"
#include "pelflow/interp.hpp"
#include "pelflow/solver.hpp"

namespace pelflow {

/// The five estimator variants. `wiener` uses a fixed mu I; the lscrv family
/// picks the regularization per pixel by GCV, scalar (lscrv, lscrvb) or
/// diagonal (lscrv1, lscrv2), on the full 3x3 mask only (lscrv, lscrv1) or
/// cycling through all nine masks (lscrvb, lscrv2).
enum class Algorithm { wiener, lscrv, lscrvb, lscrv1, lscrv2 };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::wiener, Algorithm::lscrv, Algorithm::lscrvb,
                                               Algorithm::lscrv1, Algorithm::lscrv2};

std::string_view to_string(Algorithm a);
/// Throws ParameterError for an unknown name.
Algorithm parse_algorithm(std::string_view name);

enum class InitMode { causal, zero, external };

std::string_view to_string(InitMode m);
InitMode parse_init_mode(std::string_view name);

struct EstimatorConfig {
  Algorithm algorithm = Algorithm::lscrv2;
  double dfd_threshold = 1.0;     ///< T, gray levels
  double move_threshold = 0.0;    ///< T_move, gray levels
  double update_epsilon = 0.01;   ///< epsilon on ||u||, pixels
  int max_iterations = 10;        ///< I, per mask
  double mu = 50.0;
  double max_displacement = 15.0; ///< ||d||_inf bound per mask trial
  InitMode init = InitMode::causal;
  /// Worker threads for frame-pair estimation. More than one thread
  /// requires a scan-order independent initialization; causal is then
  /// replaced by zero.
  int threads = 1;
  /// Overrides the variant's mask list (ids into mask_set()) when set.
  std::optional<std::vector<int>> mask_ids;
  GcvSearch search;

  /// Throws ParameterError when a field is out of range.
  void validate() const;
  /// Mask ids this configuration tries, in order.
  std::vector<int> masks() const;
  RegKind reg_kind() const;
  /// Initialization actually used, after the threading rule.
  InitMode effective_init() const;
};

enum class PixelStatus : unsigned char { converged, fallback_zero, stationary };

struct PixelResult {
  Vec2 d;
  PixelStatus status = PixelStatus::converged;
  int mask_id = -1;     ///< mask of the accepted estimate, -1 when none
  int iterations = 0;   ///< total update steps over all masks tried
  double abs_dfd = 0.0; ///< |DFD| at the working pixel for d
  int reg_fallbacks = 0; ///< solves whose regularization came from a fallback rung
};

/// Per-pixel recursion: stop at once if |DFD(d0)| < T, otherwise iterate
/// d <- d + u per mask until ||u|| <= eps and |DFD| < T, up to I steps per
/// mask and cycling masks for the multi-mask variants. When every mask
/// fails the result is zero displacement, or the smallest-|DFD| final
/// iterate of a mask trial when that beats zero displacement.
PixelResult estimate_pixel(const Frame& cur, const Frame& prev, const GradientField& prev_grad, Pixel r, Vec2 d0,
                           const EstimatorConfig& cfg);

struct FrameEstimate {
  FlowField flow;
  std::vector<PixelStatus> status;  ///< row-major
  std::size_t iterations = 0;
  std::size_t reg_fallbacks = 0;

  std::size_t count(PixelStatus s) const;
};

/// Raster-scan estimation of the flow mapping pixels of `cur` back into
/// `prev`. Pixels whose frame difference is within T_move are static with
/// zero displacement. `prior` supplies d0 when the init mode is external.
FrameEstimate estimate_frame_pair(const Frame& cur, const Frame& prev, const EstimatorConfig& cfg,
                                  const FlowField* prior = nullptr);

/// One field per consecutive pair, K - 1 in total.
std::vector<FlowField> estimate_sequence(const Sequence& seq, const EstimatorConfig& cfg);
std::vector<FrameEstimate> estimate_sequence_detailed(const Sequence& seq, const EstimatorConfig& cfg);

}  // namespace pelflow
