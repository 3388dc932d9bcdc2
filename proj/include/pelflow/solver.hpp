#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pelflow/frame.hpp"
#include "pelflow/interp.hpp"

namespace pelflow {

/// Stacked linearized observations z = G u + n for one neighborhood.
struct LinearSystem {
  std::vector<Vec2> gradients;  ///< rows of G: (g_x, g_y)
  std::vector<double> observations;  ///< z

  std::size_t size() const { return observations.size(); }
};

/// Diagonal regularization diag(lambda1, lambda2).
struct RegMatrix {
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  static RegMatrix scalar(double lambda) { return {lambda, lambda}; }
  friend bool operator==(const RegMatrix&, const RegMatrix&) = default;
};

using UpdateVector = Vec2;

/// Observations at `positions` for current estimate d. Each row uses the
/// gradient of prev at p - d and the observation prev(p - d) - cur(p), i.e.
/// the negated displaced frame difference, so that a positive update moves
/// along the true displacement. Throws ParameterError below kMinObservations.
LinearSystem build_system(const Frame& cur, const Frame& prev, const GradientField& prev_grad, Vec2 d,
                          std::span<const Pixel> positions);

/// u = (G^T G + L)^-1 G^T z via the 2x2 adjugate. Throws NumericError when
/// the normal matrix is singular.
UpdateVector rls_solve(const LinearSystem& sys, const RegMatrix& reg);

/// RLS with L = mu I.
UpdateVector wiener_solve(const LinearSystem& sys, double mu = 50.0);

struct InfluenceStats {
  double residual_sq = 0.0;     ///< ||(I - A) z||^2
  double trace_i_minus_a = 0.0;  ///< Tr(I - A) = N - Tr((G^T G + L)^-1 G^T G)
};

/// Residual energy and trace of I - A(L) without forming the N x N
/// influence matrix A(L) = G (G^T G + L)^-1 G^T.
InfluenceStats influence_stats(const LinearSystem& sys, const RegMatrix& reg);

/// GCV(L) = (1/N) ||(I - A) z||^2 / ((1/N) Tr(I - A))^2. Requires N >= 3;
/// throws NumericError on a non-finite result.
double gcv_value(const LinearSystem& sys, const RegMatrix& reg);

/// Search box and stopping rules of the GCV minimizers.
struct GcvSearch {
  double lambda_min = 1e-3;
  double lambda_max = 1e6;
  int grid_points = 28;
  double relative_width = 1e-3;  ///< golden-section stop, relative bracket width
  int sweeps = 5;                ///< coordinate-descent sweeps for diag(l1, l2)
  double tolerance = 1e-6;       ///< relative GCV improvement that ends descent
};

struct GcvFit {
  RegMatrix reg;
  double gcv = 0.0;
};

/// argmin of gcv_value over L = lambda I: log-spaced grid scan (ties go to
/// the largest lambda), then golden-section refinement inside the bracket
/// around the best grid point. nullopt when no evaluation is finite.
std::optional<GcvFit> minimize_gcv_scalar(const LinearSystem& sys, const GcvSearch& search = {});

/// Coordinate descent over diag(l1, l2) started from the scalar optimum.
/// Both coordinate orders are run and the better result is kept, which
/// makes the result equivariant under swapping the columns of G. Never
/// worse than the scalar start. nullopt when the scalar stage fails.
std::optional<GcvFit> minimize_gcv_diag(const LinearSystem& sys, const GcvSearch& search = {});

enum class RegKind { fixed, gcv_scalar, gcv_diag };

/// Which rung of the fallback ladder produced a regularization matrix.
enum class RegSource { fixed, gcv_scalar, gcv_diag, fallback_scalar, fallback_fixed };

struct RegChoice {
  RegMatrix reg;
  RegSource source = RegSource::fixed;
};

/// Chooses L for one system, falling back diag -> scalar -> mu I whenever a
/// minimizer fails or produces a non-positive entry.
RegChoice select_regularization(const LinearSystem& sys, RegKind kind, double mu, const GcvSearch& search = {});

}  // namespace pelflow
