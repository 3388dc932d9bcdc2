#include "pelflow/solver.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pelflow/masks.hpp"

namespace pelflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Normal equations of a system; every regularized quantity is a function of
// these plus a pass over the rows for the residual.
struct Normal {
  double a = 0.0, b = 0.0, c = 0.0;  // G^T G = [[a, b], [b, c]]
  double h1 = 0.0, h2 = 0.0;         // G^T z
};

Normal normal_equations(const LinearSystem& sys) {
  Normal n;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto g = sys.gradients[i];
    const double z = sys.observations[i];
    n.a += g.x * g.x;
    n.b += g.x * g.y;
    n.c += g.y * g.y;
    n.h1 += g.x * z;
    n.h2 += g.y * z;
  }
  return n;
}

struct Solved {
  UpdateVector u;
  double trace_hat = 0.0;  // Tr((G^T G + L)^-1 G^T G)
  bool ok = false;
};

// The expressions are written so that swapping the two columns of G along
// with (l1, l2) reproduces the same floating-point values.
Solved solve2(const Normal& n, const RegMatrix& reg) {
  const double m11 = n.a + reg.lambda1;
  const double m22 = n.c + reg.lambda2;
  const double det = m11 * m22 - n.b * n.b;
  const double norm = std::sqrt(m11 * m11 + m22 * m22 + 2.0 * n.b * n.b);
  if (!(det > 1e-12 * norm) || !std::isfinite(det)) return {};
  Solved s;
  s.u = {(m22 * n.h1 - n.b * n.h2) / det, (m11 * n.h2 - n.b * n.h1) / det};
  s.trace_hat = (m22 * n.a + m11 * n.c - 2.0 * n.b * n.b) / det;
  s.ok = true;
  return s;
}

double residual_sq(const LinearSystem& sys, UpdateVector u) {
  double sum = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto g = sys.gradients[i];
    const double r = sys.observations[i] - (g.x * u.x + g.y * u.y);
    sum += r * r;
  }
  return sum;
}

// GCV or NaN; never throws.
double gcv_eval(const LinearSystem& sys, const Normal& n, const RegMatrix& reg) {
  const auto s = solve2(n, reg);
  if (!s.ok) return kNaN;
  const double count = static_cast<double>(sys.size());
  const double trace = count - s.trace_hat;
  const double value = (residual_sq(sys, s.u) / count) / ((trace / count) * (trace / count));
  return std::isfinite(value) ? value : kNaN;
}

struct LineMin {
  double lambda = 0.0;
  double value = kNaN;
};

// Minimizes f over [lo, hi] in log-lambda: grid scan then golden section in
// the bracket of the best grid point. Ties on the grid resolve to the
// largest lambda. Returns value NaN when no evaluation was finite.
template <typename F>
LineMin line_minimize(F&& f, const GcvSearch& search) {
  const double log_lo = std::log(search.lambda_min);
  const double log_hi = std::log(search.lambda_max);
  const int points = std::max(search.grid_points, 2);
  const double step = (log_hi - log_lo) / (points - 1);

  int best = -1;
  double best_value = kNaN;
  double best_lambda = 0.0;
  for (int j = 0; j < points; ++j) {
    const double lambda = j == points - 1 ? search.lambda_max : std::exp(log_lo + j * step);
    const double v = f(lambda);
    if (std::isnan(v)) continue;
    if (best < 0 || v <= best_value) {
      best = j;
      best_value = v;
      best_lambda = lambda;
    }
  }
  if (best < 0) return {};

  double a = log_lo + std::max(best - 1, 0) * step;
  double b = log_lo + std::min(best + 1, points - 1) * step;
  constexpr double inv_phi = 0.6180339887498949;
  const double stop = std::log1p(search.relative_width);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(std::exp(x1));
  double f2 = f(std::exp(x2));
  auto worse = [](double p, double q) { return std::isnan(p) || (!std::isnan(q) && p > q); };
  while (b - a > stop) {
    if (worse(f1, f2)) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(std::exp(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(std::exp(x1));
    }
  }
  const bool take_second = worse(f1, f2);
  const double refined_value = take_second ? f2 : f1;
  const double refined_lambda = std::exp(take_second ? x2 : x1);
  if (!std::isnan(refined_value) && refined_value < best_value) return {refined_lambda, refined_value};
  return {best_lambda, best_value};
}

struct DescentResult {
  RegMatrix reg;
  double value;
};

DescentResult coordinate_descent(const LinearSystem& sys, const Normal& n, GcvFit start, bool first_coord_one,
                                 const GcvSearch& search) {
  RegMatrix reg = start.reg;
  double value = start.gcv;
  for (int sweep = 0; sweep < search.sweeps; ++sweep) {
    const double before = value;
    for (int step = 0; step < 2; ++step) {
      const bool on_one = (step == 0) == first_coord_one;
      const auto m = line_minimize(
          [&](double lambda) {
            RegMatrix trial = reg;
            (on_one ? trial.lambda1 : trial.lambda2) = lambda;
            return gcv_eval(sys, n, trial);
          },
          search);
      if (!std::isnan(m.value) && m.value < value) {
        (on_one ? reg.lambda1 : reg.lambda2) = m.lambda;
        value = m.value;
      }
    }
    if (!(before - value > search.tolerance * before)) break;
  }
  return {reg, value};
}

}  // namespace

LinearSystem build_system(const Frame& cur, const Frame& prev, const GradientField& prev_grad, Vec2 d,
                          std::span<const Pixel> positions) {
  if (positions.size() < kMinObservations) {
    throw ParameterError(fmt::format("degenerate neighborhood: {} positions, need {}", positions.size(),
                                     kMinObservations));
  }
  LinearSystem sys;
  sys.gradients.reserve(positions.size());
  sys.observations.reserve(positions.size());
  for (const auto& p : positions) {
    const double sx = p.x - d.x;
    const double sy = p.y - d.y;
    sys.gradients.push_back(sample_gradient(prev_grad, sx, sy));
    sys.observations.push_back(bilinear_sample(prev, sx, sy) - static_cast<double>(cur.at(p.x, p.y)));
  }
  return sys;
}

UpdateVector rls_solve(const LinearSystem& sys, const RegMatrix& reg) {
  const auto s = solve2(normal_equations(sys), reg);
  if (!s.ok) {
    throw NumericError(fmt::format("singular normal matrix with diag({}, {})", reg.lambda1, reg.lambda2));
  }
  return s.u;
}

UpdateVector wiener_solve(const LinearSystem& sys, double mu) { return rls_solve(sys, RegMatrix::scalar(mu)); }

InfluenceStats influence_stats(const LinearSystem& sys, const RegMatrix& reg) {
  const auto s = solve2(normal_equations(sys), reg);
  if (!s.ok) {
    throw NumericError(fmt::format("singular normal matrix with diag({}, {})", reg.lambda1, reg.lambda2));
  }
  return {residual_sq(sys, s.u), static_cast<double>(sys.size()) - s.trace_hat};
}

double gcv_value(const LinearSystem& sys, const RegMatrix& reg) {
  if (sys.size() < kMinObservations) {
    throw ParameterError(fmt::format("GCV needs at least {} observations, got {}", kMinObservations, sys.size()));
  }
  const double v = gcv_eval(sys, normal_equations(sys), reg);
  if (std::isnan(v)) throw NumericError(fmt::format("non-finite GCV at diag({}, {})", reg.lambda1, reg.lambda2));
  return v;
}

std::optional<GcvFit> minimize_gcv_scalar(const LinearSystem& sys, const GcvSearch& search) {
  if (sys.size() < kMinObservations) return std::nullopt;
  const auto n = normal_equations(sys);
  const auto m = line_minimize([&](double lambda) { return gcv_eval(sys, n, RegMatrix::scalar(lambda)); }, search);
  if (std::isnan(m.value)) return std::nullopt;
  return GcvFit{RegMatrix::scalar(m.lambda), m.value};
}

std::optional<GcvFit> minimize_gcv_diag(const LinearSystem& sys, const GcvSearch& search) {
  const auto start = minimize_gcv_scalar(sys, search);
  if (!start) return std::nullopt;
  const auto n = normal_equations(sys);
  const auto forward = coordinate_descent(sys, n, *start, true, search);
  const auto backward = coordinate_descent(sys, n, *start, false, search);
  const auto& best = backward.value < forward.value ? backward : forward;
  return GcvFit{best.reg, best.value};
}

RegChoice select_regularization(const LinearSystem& sys, RegKind kind, double mu, const GcvSearch& search) {
  // An optimum pinned to the upper edge of the box has no bracketing
  // interior minimum: GCV prefers the null model and the update would vanish.
  auto usable = [&](const std::optional<GcvFit>& f) {
    if (!f || !(f->reg.lambda1 > 0.0) || !(f->reg.lambda2 > 0.0)) return false;
    return f->reg.lambda1 < search.lambda_max && f->reg.lambda2 < search.lambda_max;
  };
  if (kind == RegKind::gcv_diag) {
    if (auto fit = minimize_gcv_diag(sys, search); usable(fit)) return {fit->reg, RegSource::gcv_diag};
    if (auto fit = minimize_gcv_scalar(sys, search); usable(fit)) return {fit->reg, RegSource::fallback_scalar};
    return {RegMatrix::scalar(mu), RegSource::fallback_fixed};
  }
  if (kind == RegKind::gcv_scalar) {
    if (auto fit = minimize_gcv_scalar(sys, search); usable(fit)) return {fit->reg, RegSource::gcv_scalar};
    return {RegMatrix::scalar(mu), RegSource::fallback_fixed};
  }
  return {RegMatrix::scalar(mu), RegSource::fixed};
}

}  // namespace pelflow
