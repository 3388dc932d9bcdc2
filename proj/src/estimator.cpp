#include "pelflow/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "pelflow/masks.hpp"

namespace pelflow {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::wiener: return "wiener";
    case Algorithm::lscrv: return "lscrv";
    case Algorithm::lscrvb: return "lscrvb";
    case Algorithm::lscrv1: return "lscrv1";
    case Algorithm::lscrv2: return "lscrv2";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms) {
    if (to_string(a) == name) return a;
  }
  throw ParameterError(fmt::format("unknown algorithm '{}'", name));
}

std::string_view to_string(InitMode m) {
  switch (m) {
    case InitMode::causal: return "causal";
    case InitMode::zero: return "zero";
    case InitMode::external: return "external";
  }
  return "?";
}

InitMode parse_init_mode(std::string_view name) {
  for (auto m : {InitMode::causal, InitMode::zero, InitMode::external}) {
    if (to_string(m) == name) return m;
  }
  throw ParameterError(fmt::format("unknown init mode '{}'", name));
}

void EstimatorConfig::validate() const {
  if (!(dfd_threshold > 0.0)) throw ParameterError("T must be > 0");
  if (!(move_threshold >= 0.0)) throw ParameterError("T_move must be >= 0");
  if (!(update_epsilon > 0.0)) throw ParameterError("eps must be > 0");
  if (max_iterations < 1) throw ParameterError("imax must be >= 1");
  if (!(mu >= 0.0)) throw ParameterError("mu must be >= 0");
  if (!(max_displacement > 0.0)) throw ParameterError("displacement bound must be > 0");
  if (threads < 1) throw ParameterError("threads must be >= 1");
  if (!(search.lambda_min > 0.0) || !(search.lambda_max > search.lambda_min)) {
    throw ParameterError("lambda search box must satisfy 0 < lambda_min < lambda_max");
  }
  if (search.grid_points < 2 || search.sweeps < 0 || !(search.relative_width > 0.0)) {
    throw ParameterError("invalid GCV search settings");
  }
  if (mask_ids) {
    if (mask_ids->empty()) throw ParameterError("mask list must not be empty");
    for (int id : *mask_ids) {
      if (id < 0 || id >= static_cast<int>(mask_set().size())) {
        throw ParameterError(fmt::format("mask id {} out of range", id));
      }
    }
  }
}

std::vector<int> EstimatorConfig::masks() const {
  if (mask_ids) return *mask_ids;
  if (algorithm == Algorithm::lscrvb || algorithm == Algorithm::lscrv2) {
    std::vector<int> all(mask_set().size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return all;
  }
  return {0};
}

RegKind EstimatorConfig::reg_kind() const {
  switch (algorithm) {
    case Algorithm::wiener: return RegKind::fixed;
    case Algorithm::lscrv:
    case Algorithm::lscrvb: return RegKind::gcv_scalar;
    case Algorithm::lscrv1:
    case Algorithm::lscrv2: return RegKind::gcv_diag;
  }
  return RegKind::fixed;
}

InitMode EstimatorConfig::effective_init() const {
  if (threads > 1 && init == InitMode::causal) return InitMode::zero;
  return init;
}

namespace {

bool is_fallback(RegSource s) { return s == RegSource::fallback_scalar || s == RegSource::fallback_fixed; }

PixelResult estimate_pixel_with(const Frame& cur, const Frame& prev, const GradientField& prev_grad, Pixel r,
                                Vec2 d0, const EstimatorConfig& cfg, const std::vector<int>& mask_ids,
                                RegKind kind) {
  PixelResult result;
  const double start_dfd = std::abs(dfd(cur, prev, r, d0));
  if (start_dfd < cfg.dfd_threshold) {
    result.d = d0;
    result.abs_dfd = start_dfd;
    return result;
  }

  // Each mask trial that runs to the iteration limit leaves one candidate;
  // the smallest working-pixel |DFD| among them is kept for the fallback.
  Vec2 best_d;
  double best_dfd = std::numeric_limits<double>::infinity();
  int best_mask = -1;
  const auto& masks = mask_set();
  for (int id : mask_ids) {
    const auto positions = gather(masks[static_cast<std::size_t>(id)], r, cur.width(), cur.height());
    if (!positions) continue;
    Vec2 d = d0;
    for (int i = 0; i < cfg.max_iterations; ++i) {
      const auto sys = build_system(cur, prev, prev_grad, d, *positions);
      const auto choice = select_regularization(sys, kind, cfg.mu, cfg.search);
      if (is_fallback(choice.source)) ++result.reg_fallbacks;
      UpdateVector u;
      try {
        u = rls_solve(sys, choice.reg);
      } catch (const NumericError&) {
        break;  // only reachable with mu = 0 and rank-deficient G
      }
      ++result.iterations;
      const Vec2 next = d + u;
      if (!std::isfinite(next.x) || !std::isfinite(next.y) ||
          std::max(std::abs(next.x), std::abs(next.y)) > cfg.max_displacement) {
        break;
      }
      const double err = std::abs(dfd(cur, prev, r, next));
      if (std::hypot(u.x, u.y) <= cfg.update_epsilon && err < cfg.dfd_threshold) {
        result.d = next;
        result.status = PixelStatus::converged;
        result.mask_id = id;
        result.abs_dfd = err;
        return result;
      }
      d = next;
      if (i == cfg.max_iterations - 1 && err < best_dfd) {
        best_dfd = err;
        best_d = next;
        best_mask = id;
      }
    }
  }

  result.status = PixelStatus::fallback_zero;
  const double zero_dfd = std::abs(dfd(cur, prev, r, {}));
  if (best_mask >= 0 && best_dfd < zero_dfd) {
    result.d = best_d;
    result.abs_dfd = best_dfd;
    result.mask_id = best_mask;
  } else {
    result.d = {};
    result.abs_dfd = zero_dfd;
  }
  return result;
}

void check_pair(const Frame& cur, const Frame& prev) {
  if (cur.width() != prev.width() || cur.height() != prev.height()) {
    throw ParameterError(fmt::format("frame sizes differ: {}x{} vs {}x{}", cur.width(), cur.height(), prev.width(),
                                     prev.height()));
  }
}

}  // namespace

PixelResult estimate_pixel(const Frame& cur, const Frame& prev, const GradientField& prev_grad, Pixel r, Vec2 d0,
                           const EstimatorConfig& cfg) {
  check_pair(cur, prev);
  if (!cur.contains(r.x, r.y)) throw ParameterError(fmt::format("pixel ({}, {}) outside the frame", r.x, r.y));
  return estimate_pixel_with(cur, prev, prev_grad, r, d0, cfg, cfg.masks(), cfg.reg_kind());
}

std::size_t FrameEstimate::count(PixelStatus s) const { return static_cast<std::size_t>(std::count(status.begin(), status.end(), s)); }

FrameEstimate estimate_frame_pair(const Frame& cur, const Frame& prev, const EstimatorConfig& cfg,
                                  const FlowField* prior) {
  check_pair(cur, prev);
  cfg.validate();
  const InitMode init = cfg.effective_init();
  if (init == InitMode::external) {
    if (prior == nullptr) throw ParameterError("external initialization requires a prior flow field");
    if (prior->width() != cur.width() || prior->height() != cur.height()) {
      throw ParameterError("prior flow size does not match the frames");
    }
  }
  const int w = cur.width();
  const int h = cur.height();
  const auto grad = gradient_field(prev);
  const auto mask_ids = cfg.masks();
  const auto kind = cfg.reg_kind();

  FrameEstimate out{FlowField(w, h), std::vector<PixelStatus>(static_cast<std::size_t>(w) * h), 0, 0};
  std::vector<std::size_t> iterations(static_cast<std::size_t>(h), 0);
  std::vector<std::size_t> fallbacks(static_cast<std::size_t>(h), 0);

  auto is_moving = [&](int x, int y) {
    return std::abs(static_cast<double>(cur.at(x, y)) - static_cast<double>(prev.at(x, y))) > cfg.move_threshold;
  };
  auto run = [&](int x, int y, Vec2 d0) {
    const auto res = estimate_pixel_with(cur, prev, grad, {x, y}, d0, cfg, mask_ids, kind);
    out.flow.set(x, y, res.d);
    out.status[static_cast<std::size_t>(y) * w + x] = res.status;
    iterations[static_cast<std::size_t>(y)] += static_cast<std::size_t>(res.iterations);
    fallbacks[static_cast<std::size_t>(y)] += static_cast<std::size_t>(res.reg_fallbacks);
  };
  auto mark_static = [&](int x, int y) {
    out.flow.set(x, y, {});
    out.status[static_cast<std::size_t>(y) * w + x] = PixelStatus::stationary;
  };

  if (init == InitMode::causal) {
    auto converged_at = [&](int x, int y) {
      return out.status[static_cast<std::size_t>(y) * w + x] == PixelStatus::converged;
    };
    // Seed from the left neighbor, else the one above, but only from
    // neighbors that converged: a fallback estimate is not a motion
    // measurement and would propagate along the scan.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!is_moving(x, y)) {
          mark_static(x, y);
          continue;
        }
        Vec2 d0;
        if (x > 0 && converged_at(x - 1, y)) {
          d0 = out.flow.at(x - 1, y);
        } else if (y > 0 && converged_at(x, y - 1)) {
          d0 = out.flow.at(x, y - 1);
        }
        run(x, y, d0);
      }
    }
  } else {
    auto do_rows = [&](int y_begin, int y_step) {
      for (int y = y_begin; y < h; y += y_step) {
        for (int x = 0; x < w; ++x) {
          if (!is_moving(x, y)) {
            mark_static(x, y);
            continue;
          }
          run(x, y, init == InitMode::external ? prior->at(x, y) : Vec2{});
        }
      }
    };
    const int workers = std::min(cfg.threads, h);
    if (workers <= 1) {
      do_rows(0, 1);
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(do_rows, t, workers);
    }
  }
  for (int y = 0; y < h; ++y) {
    out.iterations += iterations[static_cast<std::size_t>(y)];
    out.reg_fallbacks += fallbacks[static_cast<std::size_t>(y)];
  }
  return out;
}

std::vector<FrameEstimate> estimate_sequence_detailed(const Sequence& seq, const EstimatorConfig& cfg) {
  std::vector<FrameEstimate> out;
  out.reserve(seq.size() - 1);
  for (std::size_t k = 1; k < seq.size(); ++k) out.push_back(estimate_frame_pair(seq[k], seq[k - 1], cfg));
  return out;
}

std::vector<FlowField> estimate_sequence(const Sequence& seq, const EstimatorConfig& cfg) {
  std::vector<FlowField> out;
  for (auto& e : estimate_sequence_detailed(seq, cfg)) out.push_back(std::move(e.flow));
  return out;
}

}  // namespace pelflow
