#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pelflow/frame.hpp"

namespace pelflow {

struct ComponentPair {
  double x = 0.0;
  double y = 0.0;
};

/// Mean over all pixels of the squared component errors.
ComponentPair mse(const FlowField& est, const FlowField& truth);
/// Mean over all pixels of truth minus estimate, per component.
ComponentPair bias(const FlowField& est, const FlowField& truth);

/// Energy sums of one frame pair: plain frame difference and displaced
/// frame difference under `flow` (clamped bilinear warp of prev).
struct PairEnergy {
  double fd_sum = 0.0;
  double dfd_sum = 0.0;
  std::size_t pixels = 0;
};

PairEnergy pair_energy(const Frame& cur, const Frame& prev, const FlowField& flow);

/// Mean squared frame difference of one pair.
double mean_sq_fd(const Frame& cur, const Frame& prev);
/// Mean squared DFD over the whole sequence; flows.size() == K - 1.
double mean_sq_dfd(const Sequence& seq, std::span<const FlowField> flows);

/// 10 log10(sum FD^2 / sum DFD^2) over the sequence. +inf when the DFD
/// energy is zero; throws ParameterError when both energies are zero.
double imc_db(const Sequence& seq, std::span<const FlowField> flows);
double imc_db(const PairEnergy& e);
double imc_db(std::span<const PairEnergy> energies);

/// Written for +inf IMC in CSV output.
inline constexpr double kImcInfSentinel = 999.0;

struct MetricsReport {
  std::optional<ComponentPair> mse;   ///< absent without ground truth
  std::optional<ComponentPair> bias;
  double mean_sq_dfd = 0.0;
  double mean_sq_fd = 0.0;
  double imc_db = 0.0;
  std::vector<double> per_pair_imc_db;
};

/// All metrics for one estimated sequence. MSE and bias are averaged over
/// every frame pair when truth is given.
MetricsReport evaluate(const Sequence& seq, std::span<const FlowField> flows,
                       std::span<const FlowField> truth = {});

}  // namespace pelflow
