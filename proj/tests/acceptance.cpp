// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <fmt/format.h>

#include <array>
#include <chrono>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "pelflow/cli.hpp"
#include "pelflow/estimator.hpp"
#include "pelflow/image_io.hpp"
#include "pelflow/metrics.hpp"
#include "pelflow/synth.hpp"
#include "support.hpp"

using namespace pelflow;
using testing::Gen;
using testing::rel_diff;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("[{}] {} {}: {}\n", ok ? "PASS" : "FAIL", id, title, detail);
}

struct VariantResult {
  MetricsReport metrics;
  double seconds = 0.0;
};

std::map<Algorithm, VariantResult> run_all(const Sequence& frames, const std::vector<FlowField>& truth) {
  std::map<Algorithm, VariantResult> out;
  for (auto a : kAllAlgorithms) {
    EstimatorConfig c;
    c.algorithm = a;
    const auto t0 = std::chrono::steady_clock::now();
    const auto flows = estimate_sequence(frames, c);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out[a] = {evaluate(frames, flows, truth), s};
  }
  return out;
}

// lscrv2 >= lscrv1 >= lscrvb >= lscrv >= wiener - 0.1
bool ordered(const std::map<Algorithm, VariantResult>& r, std::string& why) {
  auto imc = [&](Algorithm a) { return r.at(a).metrics.imc_db; };
  const std::array<std::pair<Algorithm, Algorithm>, 3> chain{{{Algorithm::lscrv2, Algorithm::lscrv1},
                                                              {Algorithm::lscrv1, Algorithm::lscrvb},
                                                              {Algorithm::lscrvb, Algorithm::lscrv}}};
  bool ok = true;
  for (const auto& [hi, lo] : chain) {
    if (imc(hi) < imc(lo)) {
      ok = false;
      why += fmt::format(" {}<{}", to_string(hi), to_string(lo));
    }
  }
  if (imc(Algorithm::lscrv) < imc(Algorithm::wiener) - 0.1) {
    ok = false;
    why += " lscrv<wiener-0.1";
  }
  return ok;
}

std::string imc_list(const std::map<Algorithm, VariantResult>& r) {
  std::string s;
  for (auto a : kAllAlgorithms) s += fmt::format("{}{}={:.2f}", s.empty() ? "" : " ", to_string(a), r.at(a).metrics.imc_db);
  return s;
}

void criterion_1(const SyntheticSequence& scene) {
  const auto r = run_all(scene.frames, scene.truth);
  std::string why;
  bool ok = ordered(r, why);
  const double gap = r.at(Algorithm::lscrv2).metrics.imc_db - r.at(Algorithm::wiener).metrics.imc_db;
  if (gap < 0.3) {
    ok = false;
    why += " gap<0.3";
  }
  double slowest = 0.0;
  for (const auto& [a, v] : r) slowest = std::max(slowest, v.seconds);
  if (slowest >= 60.0) {
    ok = false;
    why += " runtime";
  }
  report(1, "variant ordering, noiseless", ok,
         fmt::format("{} gap={:+.2f} dB slowest={:.2f}s{}", imc_list(r), gap, slowest,
                     why.empty() ? "" : " violated:" + why));
}

void criterion_2(const SyntheticSequence& scene) {
  const auto noisy = add_noise(scene.frames, 20.0, RectSceneParams{}.seed);
  const auto r = run_all(noisy, scene.truth);
  std::string why;
  bool ok = ordered(r, why);
  for (const auto& [a, v] : r) {
    if (v.metrics.imc_db < 10.0 || v.metrics.imc_db > 20.0) {
      ok = false;
      why += fmt::format(" {}-out-of-[10,20]", to_string(a));
    }
  }
  const double m2 = r.at(Algorithm::lscrv2).metrics.mse->x;
  const double mw = r.at(Algorithm::wiener).metrics.mse->x;
  if (m2 > mw) {
    ok = false;
    why += " MSE_x(lscrv2)>MSE_x(wiener)";
  }
  report(2, "variant ordering and range, SNR 20 dB", ok,
         fmt::format("{} MSE_x lscrv2={:.4f} wiener={:.4f}{}", imc_list(r), m2, mw,
                     why.empty() ? "" : " violated:" + why));
}

void criterion_3(const SyntheticSequence& scene) {
  const auto flows = estimate_sequence(scene.frames, EstimatorConfig{});
  const auto m = evaluate(scene.frames, flows, scene.truth);
  const bool ok = m.mse->x <= 0.5 && m.mse->y <= 0.5 && std::abs(m.bias->x) <= 0.15 && std::abs(m.bias->y) <= 0.15;
  report(3, "lscrv2 accuracy, noiseless", ok,
         fmt::format("MSE=({:.4f}, {:.4f}) bias=({:+.4f}, {:+.4f})", m.mse->x, m.mse->y, m.bias->x, m.bias->y));
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  Gen gen(2024);
  double invariance = 0.0, loo = 0.0, shortcut = 0.0;
  int trace_bad = 0, shrink_bad = 0;
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(gen.integer(3, 9));
    const auto s = gen.system(n);
    const RegMatrix reg{gen.log_uniform(1e-2, 1e4), gen.log_uniform(1e-2, 1e4)};
    const auto q = oracle::random_orthonormal(n, gen);
    invariance = std::max(invariance, rel_diff(gcv_value(oracle::transform(q, s), reg), gcv_value(s, reg)));

    const auto l = gen.system(static_cast<std::size_t>(gen.integer(4, 9)));
    loo = std::max(loo, oracle::loo_worst(l, gen.log_uniform(1e-2, 1e4)));

    const auto fast = influence_stats(s, reg);
    const auto dense = oracle::influence(s, reg);
    shortcut = std::max({shortcut, rel_diff(fast.residual_sq, dense.residual_sq),
                         rel_diff(fast.trace_i_minus_a, dense.trace)});

    for (int k = 0; k < 10; ++k) {
      const RegMatrix any{gen.log_uniform(1e-8, 1e8), gen.log_uniform(1e-8, 1e8)};
      const double tr = influence_stats(s, any).trace_i_minus_a;
      if (tr < static_cast<double>(n) - 2.0 - 1e-9 || tr > static_cast<double>(n) + 1e-9) ++trace_bad;
    }

    double last = oracle::norm(rls_solve(s, RegMatrix::scalar(1e-4)));
    for (int k = 1; k <= 60; ++k) {
      const double now = oracle::norm(rls_solve(s, RegMatrix::scalar(1e-4 * std::pow(10.0, k * 0.2))));
      if (now > last * (1.0 + 1e-12)) ++shrink_bad;
      last = now;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = invariance <= 1e-9 && loo <= 1e-9 && trace_bad == 0 && shrink_bad == 0 && shortcut <= 1e-9 &&
                  secs < 5.0;
  report(4, "GCV properties", ok,
         fmt::format("invariance={:.1e} loo={:.1e} trace_violations={} shrink_violations={} shortcut={:.1e} "
                     "time={:.2f}s",
                     invariance, loo, trace_bad, shrink_bad, shortcut, secs));
}

void criterion_5() {
  const LinearSystem g{{{1, 0}, {0, 1}, {0, 0}}, {1, 2, 3}};
  const double v = gcv_value(g, RegMatrix::scalar(1.0));
  const auto u = rls_solve(LinearSystem{{{1, 0}, {0, 1}}, {4, 2}}, RegMatrix::scalar(1.0));
  const auto w = wiener_solve(LinearSystem{{{1, 0}, {0, 1}}, {102, 51}}, 50.0);
  const bool ok = std::abs(v - 7.6875) <= 1e-12 && u == Vec2{2, 1} && w == Vec2{2, 1};
  report(5, "hand-derived oracles", ok,
         fmt::format("gcv={:.15g} rls=({}, {}) wiener=({}, {})", v, u.x, u.y, w.x, w.y));
}

bool same_bits(const FlowField& a, const FlowField& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.dx()[i]) != std::bit_cast<std::uint64_t>(b.dx()[i])) return false;
    if (std::bit_cast<std::uint64_t>(a.dy()[i]) != std::bit_cast<std::uint64_t>(b.dy()[i])) return false;
  }
  return true;
}

void criterion_6(const SyntheticSequence& scene) {
  auto cfg = [](Algorithm a, bool only_m0) {
    EstimatorConfig c;
    c.algorithm = a;
    if (only_m0) c.mask_ids = std::vector<int>{0};
    return c;
  };
  const auto& cur = scene.frames[1];
  const auto& prev = scene.frames[0];
  const bool b = same_bits(estimate_frame_pair(cur, prev, cfg(Algorithm::lscrv, false)).flow,
                           estimate_frame_pair(cur, prev, cfg(Algorithm::lscrvb, true)).flow);
  const bool d = same_bits(estimate_frame_pair(cur, prev, cfg(Algorithm::lscrv1, false)).flow,
                           estimate_frame_pair(cur, prev, cfg(Algorithm::lscrv2, true)).flow);
  bool still = true;
  for (auto a : kAllAlgorithms) {
    const auto e = estimate_frame_pair(prev, prev, cfg(a, false));
    still = still && e.count(PixelStatus::stationary) == e.flow.size() && same_bits(e.flow, FlowField(prev.width(), prev.height()));
  }
  const std::vector<FlowField> zero{FlowField(prev.width(), prev.height())};
  const double imc = evaluate(Sequence({prev, prev}), zero).imc_db;
  report(6, "structural equivalences", b && d && still && imc == 0.0,
         fmt::format("lscrvb[m0]==lscrv:{} lscrv2[m0]==lscrv1:{} identical-frames-static:{} zero-flow-IMC={} dB", b, d,
                     still, imc));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (code != 0) fmt::print("  cli {} -> {}: {}", args.front(), code, err.str());
  return code;
}

void criterion_7() {
  testing::TempDir dir("accept");
  const auto cfg = dir / "fixed.cfg";
  {
    RunConfig c;
    c.command = "compare";
    c.snr_db = 20.0;
    std::ofstream(cfg) << format_sidecar(to_settings(c));
  }
  const bool ran = cli({"compare", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0 &&
                   cli({"compare", "--config", cfg.string(), "--out", (dir / "b").string()}) == 0;
  std::size_t compared = 0, differing = 0;
  if (ran) {
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "a")) {
      const auto ext = entry.path().extension();
      if (ext != ".flo" && ext != ".csv" && entry.path().filename() != "table.txt") continue;
      ++compared;
      if (slurp(entry.path()) != slurp(dir / "b" / std::filesystem::relative(entry.path(), dir / "a"))) ++differing;
    }
  }
  report(7, "determinism of compare", ran && compared > 0 && differing == 0,
         fmt::format("{} files compared, {} differ", compared, differing));
}

void criterion_8() {
  testing::TempDir dir("accept");
  Gen gen(88);
  int pgm_bad = 0, flo_bad = 0;
  const int cases = 150;
  for (int t = 0; t < cases; ++t) {
    const auto f = gen.frame(gen.integer(1, 64), gen.integer(1, 64));
    save_pgm(f, dir / "f.pgm");
    if (!(load_pgm(dir / "f.pgm") == f)) ++pgm_bad;

    FlowField w(gen.integer(1, 64), gen.integer(1, 64));
    for (auto& v : w.dx()) v = static_cast<float>(gen.uniform(-20, 20));
    for (auto& v : w.dy()) v = static_cast<float>(gen.log_uniform(1e-6, 1e3));
    save_flo(w, dir / "w.flo");
    if (!same_bits(load_flo(dir / "w.flo"), w)) ++flo_bad;
  }
  report(8, "file-format round trips", pgm_bad == 0 && flo_bad == 0,
         fmt::format("{} PGM + {} .flo cases, {} + {} mismatches", cases, cases, pgm_bad, flo_bad));
}

// Full CLI path on a second scene with different geometry, motion and texture.
void second_scene() {
  testing::TempDir dir("accept");
  const std::vector<std::string> scene{"--width", "96", "--height", "80", "--rect-x", "30", "--rect-y", "24",
                                       "--rect-w", "24", "--rect-h", "20", "--bg-dx", "-1", "--bg-dy", "1",
                                       "--rect-dx", "2", "--rect-dy", "-1", "--frames", "3", "--seed", "7",
                                       "--texture", "field"};
  auto synth = std::vector<std::string>{"synth", "--out", (dir / "s").string()};
  synth.insert(synth.end(), scene.begin(), scene.end());
  bool ok = cli(synth) == 0;
  const auto f = [&](int k) { return (dir / "s" / fmt::format("frame_{:03d}.pgm", k)).string(); };
  const auto t = [&](int k) { return (dir / "s" / fmt::format("truth_{:03d}.flo", k)).string(); };
  ok = ok && cli({"estimate", "--out", (dir / "e").string(), f(0), f(1), f(2)}) == 0;
  ok = ok && cli({"metrics", "--flow", (dir / "e" / "flow_000.flo").string(), "--flow",
                  (dir / "e" / "flow_001.flo").string(), "--truth", t(0), "--truth", t(1), "--out",
                  (dir / "m").string(), f(0), f(1), f(2)}) == 0;
  ok = ok && cli({"compare", "--out", (dir / "c").string(), f(0), f(1), f(2)}) == 0;
  std::string detail = "pipeline failed";
  if (ok) {
    const auto csv = slurp(dir / "m" / "metrics.csv");
    detail = "synth -> estimate -> metrics -> compare on 96x80, 3 frames; " +
             std::string(csv.substr(csv.find("IMC"), csv.find('\n', csv.find("IMC")) - csv.find("IMC")));
  }
  if (!ok) ++failures;
  fmt::print("[{}] second synthetic scene through the CLI: {}\n", ok ? "PASS" : "FAIL", detail);
}

}  // namespace

int main() {
  const auto scene = gen_rect_sequence(RectSceneParams{});
  criterion_1(scene);
  criterion_2(scene);
  criterion_3(scene);
  criterion_4();
  criterion_5();
  criterion_6(scene);
  criterion_7();
  criterion_8();
  second_scene();
  fmt::print("{} failing\n", failures);
  return failures == 0 ? 0 : 1;
}
