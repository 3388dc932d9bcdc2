#include "pelflow/metrics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pelflow/interp.hpp"

namespace pelflow {

namespace {

void check_fields(const FlowField& a, const FlowField& b) {
  if (!a.same_shape(b)) {
    throw ParameterError(fmt::format("flow sizes differ: {}x{} vs {}x{}", a.width(), a.height(), b.width(), b.height()));
  }
}

void check_flows(const Sequence& seq, std::span<const FlowField> flows) {
  if (flows.size() + 1 != seq.size()) {
    throw ParameterError(fmt::format("{} flow fields for {} frames, expected {}", flows.size(), seq.size(),
                                     seq.size() - 1));
  }
  for (const auto& f : flows) {
    if (f.width() != seq.width() || f.height() != seq.height()) {
      throw ParameterError(fmt::format("flow is {}x{} but frames are {}x{}", f.width(), f.height(), seq.width(),
                                       seq.height()));
    }
  }
}

}  // namespace

ComponentPair mse(const FlowField& est, const FlowField& truth) {
  check_fields(est, truth);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double ex = truth.dx()[i] - est.dx()[i];
    const double ey = truth.dy()[i] - est.dy()[i];
    sx += ex * ex;
    sy += ey * ey;
  }
  const double n = static_cast<double>(est.size());
  return {sx / n, sy / n};
}

ComponentPair bias(const FlowField& est, const FlowField& truth) {
  check_fields(est, truth);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    sx += truth.dx()[i] - est.dx()[i];
    sy += truth.dy()[i] - est.dy()[i];
  }
  const double n = static_cast<double>(est.size());
  return {sx / n, sy / n};
}

PairEnergy pair_energy(const Frame& cur, const Frame& prev, const FlowField& flow) {
  if (cur.width() != prev.width() || cur.height() != prev.height() || flow.width() != cur.width() ||
      flow.height() != cur.height()) {
    throw ParameterError("pair_energy: frame and flow sizes must agree");
  }
  PairEnergy e;
  for (int y = 0; y < cur.height(); ++y) {
    for (int x = 0; x < cur.width(); ++x) {
      const double fd = static_cast<double>(cur.at(x, y)) - static_cast<double>(prev.at(x, y));
      const double d = dfd(cur, prev, {x, y}, flow.at(x, y));
      e.fd_sum += fd * fd;
      e.dfd_sum += d * d;
    }
  }
  e.pixels = cur.size();
  return e;
}

double mean_sq_fd(const Frame& cur, const Frame& prev) {
  if (cur.width() != prev.width() || cur.height() != prev.height()) {
    throw ParameterError("mean_sq_fd: frame sizes differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    const double d = static_cast<double>(cur.samples()[i]) - static_cast<double>(prev.samples()[i]);
    s += d * d;
  }
  return s / static_cast<double>(cur.size());
}

double mean_sq_dfd(const Sequence& seq, std::span<const FlowField> flows) {
  check_flows(seq, flows);
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 1; k < seq.size(); ++k) {
    const auto e = pair_energy(seq[k], seq[k - 1], flows[k - 1]);
    s += e.dfd_sum;
    n += e.pixels;
  }
  return s / static_cast<double>(n);
}

double imc_db(std::span<const PairEnergy> energies) {
  double fd = 0.0, dfd_total = 0.0;
  for (const auto& e : energies) {
    fd += e.fd_sum;
    dfd_total += e.dfd_sum;
  }
  if (dfd_total == 0.0) {
    if (fd == 0.0) throw ParameterError("IMC is undefined: frame and displaced frame differences are both zero");
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(fd / dfd_total);
}

double imc_db(const PairEnergy& e) { return imc_db(std::span<const PairEnergy>(&e, 1)); }

double imc_db(const Sequence& seq, std::span<const FlowField> flows) {
  check_flows(seq, flows);
  std::vector<PairEnergy> energies;
  for (std::size_t k = 1; k < seq.size(); ++k) energies.push_back(pair_energy(seq[k], seq[k - 1], flows[k - 1]));
  return imc_db(energies);
}

MetricsReport evaluate(const Sequence& seq, std::span<const FlowField> flows, std::span<const FlowField> truth) {
  check_flows(seq, flows);
  if (!truth.empty()) check_flows(seq, truth);
  MetricsReport r;
  std::vector<PairEnergy> energies;
  double fd = 0.0, dfd_total = 0.0;
  std::size_t pixels = 0;
  for (std::size_t k = 1; k < seq.size(); ++k) {
    const auto e = pair_energy(seq[k], seq[k - 1], flows[k - 1]);
    energies.push_back(e);
    fd += e.fd_sum;
    dfd_total += e.dfd_sum;
    pixels += e.pixels;
    // a static identical pair has no defined IMC; report 0 dB for it
    r.per_pair_imc_db.push_back(e.fd_sum == 0.0 && e.dfd_sum == 0.0 ? 0.0 : imc_db(e));
  }
  r.mean_sq_fd = fd / static_cast<double>(pixels);
  r.mean_sq_dfd = dfd_total / static_cast<double>(pixels);
  r.imc_db = (fd == 0.0 && dfd_total == 0.0) ? 0.0 : imc_db(energies);
  if (!truth.empty()) {
    ComponentPair m, b;
    for (std::size_t k = 0; k < flows.size(); ++k) {
      const auto mk = mse(flows[k], truth[k]);
      const auto bk = bias(flows[k], truth[k]);
      m.x += mk.x;
      m.y += mk.y;
      b.x += bk.x;
      b.y += bk.y;
    }
    const double n = static_cast<double>(flows.size());
    r.mse = ComponentPair{m.x / n, m.y / n};
    r.bias = ComponentPair{b.x / n, b.y / n};
  }
  return r;
}

}  // namespace pelflow
