#include "pelflow/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "pelflow/error.hpp"
#include "pelflow/image_io.hpp"
#include "pelflow/interp.hpp"
#include "pelflow/masks.hpp"
#include "pelflow/metrics.hpp"
#include "pelflow/report.hpp"

namespace fs = std::filesystem;

namespace pelflow {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParameterError(fmt::format("{}: cannot parse '{}' as a number", key, text));
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename Range>
std::string join(const Range& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_same_v<std::decay_t<decltype(item)>, fs::path>) {
      out += item.string();
    } else {
      out += fmt::format("{}", item);
    }
  }
  return out;
}

std::vector<fs::path> to_paths(const std::string& text) {
  std::vector<fs::path> out;
  for (auto& s : split_list(text)) out.emplace_back(s);
  return out;
}

// Option groups; a subcommand exposes the union of its groups and its
// sidecar records the same keys.
enum Group : unsigned { kScene = 1, kNoise = 2, kEstimator = 4, kFrames = 8, kMetricsIn = 16, kOut = 32 };

struct Key {
  const char* name;
  unsigned group;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PELFLOW_INT_KEY(key, grp, field, help)                                                           \
  Key {                                                                                                  \
    key, grp, help, [](RunConfig& c, const std::string& v) { c.field = parse_number<int>(key, v); },    \
        [](const RunConfig& c) { return fmt::format("{}", c.field); }                                    \
  }
#define PELFLOW_REAL_KEY(key, grp, field, help)                                                          \
  Key {                                                                                                  \
    key, grp, help, [](RunConfig& c, const std::string& v) { c.field = parse_number<double>(key, v); }, \
        [](const RunConfig& c) { return fmt::format("{}", c.field); }                                    \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      PELFLOW_INT_KEY("width", kScene, scene.width, "scene width"),
      PELFLOW_INT_KEY("height", kScene, scene.height, "scene height"),
      PELFLOW_INT_KEY("rect-x", kScene, scene.rect_x, "rectangle left column in the first frame"),
      PELFLOW_INT_KEY("rect-y", kScene, scene.rect_y, "rectangle top row in the first frame"),
      PELFLOW_INT_KEY("rect-w", kScene, scene.rect_width, "rectangle width"),
      PELFLOW_INT_KEY("rect-h", kScene, scene.rect_height, "rectangle height"),
      PELFLOW_INT_KEY("bg-dx", kScene, scene.background_dx, "background motion per frame, x"),
      PELFLOW_INT_KEY("bg-dy", kScene, scene.background_dy, "background motion per frame, y"),
      PELFLOW_INT_KEY("rect-dx", kScene, scene.rect_dx, "rectangle motion per frame, x"),
      PELFLOW_INT_KEY("rect-dy", kScene, scene.rect_dy, "rectangle motion per frame, y"),
      PELFLOW_REAL_KEY("bg-mean", kScene, scene.background_mean, "background texture mean"),
      PELFLOW_REAL_KEY("bg-var", kScene, scene.background_variance, "background texture variance"),
      PELFLOW_REAL_KEY("rect-mean", kScene, scene.rect_mean, "rectangle texture mean"),
      PELFLOW_REAL_KEY("rect-var", kScene, scene.rect_variance, "rectangle texture variance"),
      PELFLOW_INT_KEY("frames", kScene, scene.frames, "number of frames"),
      Key{"seed", kScene, "seed for texture and noise",
          [](RunConfig& c, const std::string& v) { c.scene.seed = parse_number<std::uint64_t>("seed", v); },
          [](const RunConfig& c) { return fmt::format("{}", c.scene.seed); }},
      Key{"texture", kScene, "texture variance meaning: innovation or field",
          [](RunConfig& c, const std::string& v) { c.scene.texture_scaling = parse_texture_scaling(v); },
          [](const RunConfig& c) { return std::string(to_string(c.scene.texture_scaling)); }},
      PELFLOW_REAL_KEY("snr", kNoise, snr_db, "noise level in dB; inf for noiseless"),
      Key{"algo", kEstimator, "wiener, lscrv, lscrvb, lscrv1 or lscrv2",
          [](RunConfig& c, const std::string& v) { c.estimator.algorithm = parse_algorithm(v); },
          [](const RunConfig& c) { return std::string(to_string(c.estimator.algorithm)); }},
      PELFLOW_REAL_KEY("T", kEstimator, estimator.dfd_threshold, "|DFD| convergence threshold"),
      PELFLOW_REAL_KEY("Tmove", kEstimator, estimator.move_threshold, "frame-difference threshold for static pixels"),
      PELFLOW_REAL_KEY("eps", kEstimator, estimator.update_epsilon, "update-norm convergence threshold"),
      PELFLOW_INT_KEY("imax", kEstimator, estimator.max_iterations, "iterations per mask"),
      PELFLOW_REAL_KEY("mu", kEstimator, estimator.mu, "Wiener regularization"),
      PELFLOW_REAL_KEY("max-disp", kEstimator, estimator.max_displacement, "displacement bound per mask trial"),
      Key{"init", kEstimator, "causal, zero or external",
          [](RunConfig& c, const std::string& v) { c.estimator.init = parse_init_mode(v); },
          [](const RunConfig& c) { return std::string(to_string(c.estimator.init)); }},
      PELFLOW_INT_KEY("threads", kEstimator, estimator.threads, "worker threads per frame pair"),
      Key{"masks", kEstimator, "mask ids to try, e.g. 0,1,2, or 'default'",
          [](RunConfig& c, const std::string& v) {
            if (v == "default") {
              c.estimator.mask_ids.reset();
              return;
            }
            std::vector<int> ids;
            for (auto& s : split_list(v)) ids.push_back(parse_number<int>("masks", s));
            c.estimator.mask_ids = std::move(ids);
          },
          [](const RunConfig& c) { return c.estimator.mask_ids ? join(*c.estimator.mask_ids) : std::string("default"); }},
      PELFLOW_REAL_KEY("lambda-min", kEstimator, estimator.search.lambda_min, "GCV search lower bound"),
      PELFLOW_REAL_KEY("lambda-max", kEstimator, estimator.search.lambda_max, "GCV search upper bound"),
      PELFLOW_INT_KEY("grid", kEstimator, estimator.search.grid_points, "GCV grid points"),
      PELFLOW_REAL_KEY("golden-tol", kEstimator, estimator.search.relative_width, "golden-section relative width"),
      PELFLOW_INT_KEY("sweeps", kEstimator, estimator.search.sweeps, "coordinate-descent sweeps"),
      PELFLOW_REAL_KEY("sweep-tol", kEstimator, estimator.search.tolerance, "coordinate-descent tolerance"),
      Key{"prior", kEstimator, "prior .flo files for external init, one per pair",
          [](RunConfig& c, const std::string& v) { c.prior = to_paths(v); },
          [](const RunConfig& c) { return join(c.prior); }},
      Key{"inputs", kFrames, "input frames (PGM), in order",
          [](RunConfig& c, const std::string& v) { c.frames = to_paths(v); },
          [](const RunConfig& c) { return join(c.frames); }},
      Key{"flow", kMetricsIn, "estimated .flo files, one per pair",
          [](RunConfig& c, const std::string& v) { c.flows = to_paths(v); },
          [](const RunConfig& c) { return join(c.flows); }},
      Key{"truth", kMetricsIn, "ground-truth .flo files, one per pair",
          [](RunConfig& c, const std::string& v) { c.truth = to_paths(v); },
          [](const RunConfig& c) { return join(c.truth); }},
      Key{"name", kMetricsIn, "column label in the report",
          [](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name; }},
      Key{"out", kOut, "output directory",
          [](RunConfig& c, const std::string& v) { c.out = v; }, [](const RunConfig& c) { return c.out.string(); }},
  };
  return table;
}

#undef PELFLOW_INT_KEY
#undef PELFLOW_REAL_KEY

unsigned groups_of(const std::string& command) {
  if (command == "synth") return kScene | kNoise | kOut;
  if (command == "estimate") return kEstimator | kFrames | kOut;
  if (command == "metrics") return kFrames | kMetricsIn | kOut;
  if (command == "compare") return kScene | kNoise | kEstimator | kFrames | kOut;
  return 0;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("{}: cannot open for writing", path.string()));
  f << text;
  if (!f) throw IoError(fmt::format("{}: write failed", path.string()));
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("{}: cannot open", path.string()));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("{}: {}", dir.string(), ec.message()));
}

fs::path numbered(const fs::path& dir, std::string_view stem, std::size_t k, std::string_view ext) {
  return dir / fmt::format("{}_{:03d}{}", stem, k, ext);
}

void write_sidecar(const RunConfig& cfg) {
  Settings all = to_settings(cfg);
  write_text(cfg.out / fmt::format("{}.cfg", cfg.command), format_sidecar(all));
}

Frame status_image(const FrameEstimate& e) {
  Frame img(e.flow.width(), e.flow.height());
  auto px = img.samples();
  for (std::size_t i = 0; i < e.status.size(); ++i) {
    switch (e.status[i]) {
      case PixelStatus::stationary: px[i] = 0; break;
      case PixelStatus::fallback_zero: px[i] = 128; break;
      case PixelStatus::converged: px[i] = 255; break;
    }
  }
  return img;
}

Frame error_map(const Frame& cur, const Frame& prev, const FlowField& flow) {
  Frame img(cur.width(), cur.height());
  for (int y = 0; y < cur.height(); ++y) {
    for (int x = 0; x < cur.width(); ++x) {
      const double v = std::abs(dfd(cur, prev, {x, y}, flow.at(x, y))) * kErrorMapGain;
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
  }
  return img;
}

std::vector<FlowField> load_flows(const std::vector<fs::path>& paths, const Sequence& seq, const char* what) {
  if (paths.size() != seq.size() - 1) {
    throw ParameterError(fmt::format("expected {} {} file(s) for {} frames, got {}", seq.size() - 1, what,
                                     seq.size(), paths.size()));
  }
  std::vector<FlowField> out;
  for (const auto& p : paths) {
    auto f = load_flo(p);
    if (f.width() != seq.width() || f.height() != seq.height()) {
      throw ParameterError(fmt::format("{}: flow is {}x{}, frames are {}x{}", p.string(), f.width(), f.height(),
                                       seq.width(), seq.height()));
    }
    out.push_back(std::move(f));
  }
  return out;
}

Sequence load_frames(const RunConfig& cfg) {
  if (cfg.frames.size() < 2) {
    throw ParameterError(fmt::format("at least two input frames are required, got {}", cfg.frames.size()));
  }
  try {
    return load_sequence(cfg.frames);
  } catch (const ParameterError& e) {
    throw ParseError(e.what());  // mismatched inputs are a data problem, not a usage one
  }
}

struct VariantRun {
  std::vector<FrameEstimate> pairs;
  std::vector<double> seconds;
};

VariantRun run_variant(const Sequence& seq, const EstimatorConfig& est, const std::vector<FlowField>& prior) {
  VariantRun run;
  for (std::size_t k = 1; k < seq.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const FlowField* p = prior.empty() ? nullptr : &prior[k - 1];
    run.pairs.push_back(estimate_frame_pair(seq[k], seq[k - 1], est, p));
    // reports describe the flow as stored on disk
    for (auto& v : run.pairs.back().flow.dx()) v = static_cast<float>(v);
    for (auto& v : run.pairs.back().flow.dy()) v = static_cast<float>(v);
    run.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return run;
}

std::vector<FlowField> flows_of(const VariantRun& run) {
  std::vector<FlowField> out;
  for (const auto& e : run.pairs) out.push_back(e.flow);
  return out;
}

void log_variant(std::ostream& log, std::string_view algo, const VariantRun& run, const MetricsReport& m) {
  for (std::size_t k = 0; k < run.pairs.size(); ++k) {
    const auto& e = run.pairs[k];
    fmt::print(log,
               "algo={} pair={} seconds={:.3f} converged={} fallback={} static={} iterations={} reg_fallbacks={} "
               "imc_db={:.4f}\n",
               algo, k, run.seconds[k], e.count(PixelStatus::converged), e.count(PixelStatus::fallback_zero),
               e.count(PixelStatus::stationary), e.iterations, e.reg_fallbacks, m.per_pair_imc_db[k]);
  }
  fmt::print(log, "algo={} imc_db={:.4f} mean_sq_dfd={:.6f}\n", algo, m.imc_db, m.mean_sq_dfd);
}

void write_variant_outputs(const fs::path& dir, const Sequence& seq, const VariantRun& run, bool error_maps) {
  make_dir(dir);
  for (std::size_t k = 0; k < run.pairs.size(); ++k) {
    const auto& e = run.pairs[k];
    save_flo(e.flow, numbered(dir, "flow", k, ".flo"));
    save_flow_csv(e.flow, numbered(dir, "flow", k, ".csv"));
    save_pgm(status_image(e), numbered(dir, "status", k, ".pgm"));
    if (error_maps) save_pgm(error_map(seq[k + 1], seq[k], e.flow), numbered(dir, "errmap", k, ".pgm"));
  }
}

void save_scene(const fs::path& dir, const SyntheticSequence& scene, const Sequence* noisy) {
  make_dir(dir);
  for (std::size_t k = 0; k < scene.frames.size(); ++k) save_pgm(scene.frames[k], numbered(dir, "frame", k, ".pgm"));
  for (std::size_t k = 0; k < scene.truth.size(); ++k) {
    save_flo(scene.truth[k], numbered(dir, "truth", k, ".flo"));
    save_flow_csv(scene.truth[k], numbered(dir, "truth", k, ".csv"));
  }
  if (noisy != nullptr) {
    for (std::size_t k = 0; k < noisy->size(); ++k) save_pgm((*noisy)[k], numbered(dir, "noisy", k, ".pgm"));
  }
}

int cmd_synth(RunConfig cfg, std::ostream& out) {
  const auto scene = gen_rect_sequence(cfg.scene);
  std::optional<Sequence> noisy;
  if (!std::isinf(cfg.snr_db)) noisy = add_noise(scene.frames, cfg.snr_db, cfg.scene.seed);
  save_scene(cfg.out, scene, noisy ? &*noisy : nullptr);
  write_sidecar(cfg);
  fmt::print(out, "wrote {} frames of {}x{} to {}\n", scene.frames.size(), cfg.scene.width, cfg.scene.height,
             cfg.out.string());
  return kExitOk;
}

int cmd_estimate(RunConfig cfg, std::ostream& out) {
  const auto seq = load_frames(cfg);
  cfg.estimator.validate();
  std::vector<FlowField> prior;
  if (cfg.estimator.effective_init() == InitMode::external) prior = load_flows(cfg.prior, seq, "prior");
  make_dir(cfg.out);
  const auto run = run_variant(seq, cfg.estimator, prior);
  write_variant_outputs(cfg.out, seq, run, false);
  const auto flows = flows_of(run);
  const auto m = evaluate(seq, flows);
  std::ostringstream log;
  log_variant(log, to_string(cfg.estimator.algorithm), run, m);
  write_text(cfg.out / "run.log", log.str());
  write_sidecar(cfg);
  fmt::print(out, "{}: {} pair(s), IMC {:.4f} dB\n", to_string(cfg.estimator.algorithm), flows.size(), m.imc_db);
  return kExitOk;
}

int cmd_metrics(RunConfig cfg, std::ostream& out) {
  const auto seq = load_frames(cfg);
  const auto flows = load_flows(cfg.flows, seq, "flow");
  std::vector<FlowField> truth;
  if (!cfg.truth.empty()) truth = load_flows(cfg.truth, seq, "truth");
  const VariantReport report{cfg.name, evaluate(seq, flows, truth)};
  const auto table = format_table(std::span(&report, 1));
  out << table;
  if (!cfg.out.empty()) {
    make_dir(cfg.out);
    write_text(cfg.out / "metrics.txt", table);
    write_text(cfg.out / "metrics.csv", format_csv(std::span(&report, 1)));
    write_text(cfg.out / "pair_imc.csv", format_pair_imc_csv(std::span(&report, 1)));
    write_sidecar(cfg);
  }
  return kExitOk;
}

int cmd_compare(RunConfig cfg, std::ostream& out) {
  cfg.estimator.validate();
  make_dir(cfg.out);
  std::optional<Sequence> seq;
  std::vector<FlowField> truth;
  if (cfg.frames.empty()) {
    auto scene = gen_rect_sequence(cfg.scene);
    std::optional<Sequence> noisy;
    if (!std::isinf(cfg.snr_db)) noisy = add_noise(scene.frames, cfg.snr_db, cfg.scene.seed);
    save_scene(cfg.out / "input", scene, noisy ? &*noisy : nullptr);
    seq = noisy ? std::move(*noisy) : scene.frames;
    truth = std::move(scene.truth);
  } else {
    seq = load_frames(cfg);
  }
  std::vector<FlowField> prior;
  if (cfg.estimator.effective_init() == InitMode::external) prior = load_flows(cfg.prior, *seq, "prior");

  std::vector<VariantReport> reports;
  std::ostringstream log;
  for (auto algo : kAllAlgorithms) {
    auto est = cfg.estimator;
    est.algorithm = algo;
    const auto run = run_variant(*seq, est, prior);
    write_variant_outputs(cfg.out / std::string(to_string(algo)), *seq, run, true);
    const auto flows = flows_of(run);
    reports.push_back({std::string(to_string(algo)), evaluate(*seq, flows, truth)});
    log_variant(log, to_string(algo), run, reports.back().metrics);
  }
  const auto table = format_table(reports);
  write_text(cfg.out / "table.txt", table);
  write_text(cfg.out / "metrics.csv", format_csv(reports));
  write_text(cfg.out / "pair_imc.csv", format_pair_imc_csv(reports));
  write_text(cfg.out / "run.log", log.str());
  write_sidecar(cfg);
  out << table;
  return kExitOk;
}

int cmd_masks_show(int id, std::ostream& out) {
  const auto& masks = mask_set();
  if (id >= static_cast<int>(masks.size())) throw ParameterError(fmt::format("mask id {} out of range", id));
  for (const auto& m : masks) {
    if (id >= 0 && m.id != id) continue;
    fmt::print(out, "m{} ({} pixels)\n{}\n", m.id, m.offsets.size(), render_mask(m));
  }
  return kExitOk;
}

}  // namespace

Settings parse_sidecar(const std::string& text) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(fmt::format("config line {}: expected key=value", number));
    auto key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ParseError(fmt::format("config line {}: empty key", number));
    out[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

std::string format_sidecar(const Settings& settings) {
  std::string out;
  for (const auto& [k, v] : settings) out += fmt::format("{}={}\n", k, v);
  return out;
}

RunConfig apply_settings(RunConfig base, const Settings& settings) {
  for (const auto& [k, v] : settings) {
    if (k == "command") continue;
    const auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& key) { return k == key.name; });
    if (it == keys().end()) throw ParameterError(fmt::format("unknown setting '{}'", k));
    it->set(base, v);
  }
  return base;
}

Settings to_settings(const RunConfig& cfg) {
  Settings out;
  const unsigned groups = groups_of(cfg.command);
  out["command"] = cfg.command;
  for (const auto& key : keys()) {
    if (groups == 0 || (key.group & groups) != 0) out[key.name] = key.get(cfg);
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pel-recursive motion estimation with GCV-selected regularization", "pelflow"};
  app.require_subcommand(1);

  struct Bound {
    std::string key;
    std::string single;
    std::vector<std::string> many;
    CLI::Option* option = nullptr;
    CLI::App* owner = nullptr;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  std::string config_path;
  int mask_id = -1;

  auto add_command = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "sidecar file with key=value settings; flags override it");
    const unsigned groups = groups_of(name);
    for (const auto& key : keys()) {
      if ((key.group & groups) == 0) continue;
      if (name == "compare" && std::string_view(key.name) == "algo") continue;
      auto b = std::make_unique<Bound>();
      b->key = key.name;
      b->owner = sub;
      const std::string k = key.name;
      if (k == "inputs") {
        b->option = sub->add_option("inputs", b->many, key.help);
      } else if (k == "flow" || k == "truth" || k == "prior") {
        // one path per occurrence (or a comma list) so positional frames are not swallowed
        b->option = sub->add_option("--" + k, b->many, key.help)->delimiter(',')->allow_extra_args(false);
      } else {
        b->option = sub->add_option("--" + k, b->single, key.help);
      }
      bound.push_back(std::move(b));
    }
    return sub;
  };
  auto* synth = add_command("synth", "generate the moving-rectangle sequence with ground truth");
  auto* estimate = add_command("estimate", "estimate one flow field per consecutive frame pair");
  auto* metrics = add_command("metrics", "evaluate flow fields against frames and optional truth");
  auto* compare = add_command("compare", "run all five variants on the same input and tabulate");
  auto* masks = app.add_subcommand("masks", "inspect the mask templates");
  masks->require_subcommand(1);
  auto* show = masks->add_subcommand("show", "print the mask geometries");
  show->add_option("--id", mask_id, "only this mask");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (show->parsed()) return cmd_masks_show(mask_id, out);

    CLI::App* active = nullptr;
    for (auto* sub : {synth, estimate, metrics, compare}) {
      if (sub->parsed()) active = sub;
    }
    RunConfig cfg;
    cfg.command = active->get_name();
    if (cfg.command == "metrics") cfg.out.clear();
    if (!config_path.empty()) cfg = apply_settings(cfg, parse_sidecar(read_text(config_path)));
    cfg.command = active->get_name();
    Settings given;
    for (const auto& b : bound) {
      if (b->owner != active || b->option->count() == 0) continue;
      given[b->key] = b->many.empty() ? b->single : join(b->many);
    }
    cfg = apply_settings(cfg, given);
    if (cfg.out.empty() && cfg.command != "metrics") cfg.out = ".";

    if (cfg.command == "synth") return cmd_synth(std::move(cfg), out);
    if (cfg.command == "estimate") return cmd_estimate(std::move(cfg), out);
    if (cfg.command == "metrics") return cmd_metrics(std::move(cfg), out);
    return cmd_compare(std::move(cfg), out);
  } catch (const ParameterError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const NumericError& e) {
    fmt::print(err, "numeric failure: {}\n", e.what());
    return kExitNumeric;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitData;
  }
}

}  // namespace pelflow
