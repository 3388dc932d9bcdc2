#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "pelflow/cli.hpp"
#include "pelflow/estimator.hpp"
#include "pelflow/image_io.hpp"
#include "pelflow/masks.hpp"
#include "pelflow/metrics.hpp"
#include "pelflow/solver.hpp"
#include "pelflow/synth.hpp"

namespace py = pybind11;
using namespace pelflow;

namespace {

using Image = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using Field = py::array_t<double, py::array::c_style | py::array::forcecast>;

Frame to_frame(const Image& a) {
  if (a.ndim() != 2) throw ParameterError("frames are 2-D (rows, cols) uint8 arrays");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  return Frame(w, h, std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

Image from_frame(const Frame& f) {
  Image a({f.height(), f.width()});
  std::memcpy(a.mutable_data(), f.samples().data(), f.size());
  return a;
}

// (rows, cols, 2) with [..., 0] = dx and [..., 1] = dy
FlowField to_flow(const Field& a) {
  if (a.ndim() != 3 || a.shape(2) != 2) throw ParameterError("flow fields are (rows, cols, 2) arrays");
  FlowField f(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  const double* p = a.data();
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.dx()[i] = p[2 * i];
    f.dy()[i] = p[2 * i + 1];
  }
  return f;
}

Field from_flow(const FlowField& f) {
  Field a({f.height(), f.width(), 2});
  double* p = a.mutable_data();
  for (std::size_t i = 0; i < f.size(); ++i) {
    p[2 * i] = f.dx()[i];
    p[2 * i + 1] = f.dy()[i];
  }
  return a;
}

Sequence to_sequence(const std::vector<Image>& frames) {
  std::vector<Frame> v;
  for (const auto& a : frames) v.push_back(to_frame(a));
  return Sequence(std::move(v));
}

std::vector<FlowField> to_flows(const std::vector<Field>& flows) {
  std::vector<FlowField> v;
  for (const auto& a : flows) v.push_back(to_flow(a));
  return v;
}

EstimatorConfig make_config(const std::string& algorithm, const py::kwargs& kw) {
  EstimatorConfig c;
  c.algorithm = parse_algorithm(algorithm);
  for (const auto& [k, v] : kw) {
    const auto key = k.cast<std::string>();
    if (key == "T") c.dfd_threshold = v.cast<double>();
    else if (key == "T_move") c.move_threshold = v.cast<double>();
    else if (key == "eps") c.update_epsilon = v.cast<double>();
    else if (key == "imax") c.max_iterations = v.cast<int>();
    else if (key == "mu") c.mu = v.cast<double>();
    else if (key == "max_disp") c.max_displacement = v.cast<double>();
    else if (key == "init") c.init = parse_init_mode(v.cast<std::string>());
    else if (key == "threads") c.threads = v.cast<int>();
    else if (key == "masks") c.mask_ids = v.cast<std::vector<int>>();
    else throw ParameterError("unknown estimator option '" + key + "'");
  }
  c.validate();
  return c;
}

LinearSystem to_system(const Field& g, const std::vector<double>& z) {
  if (g.ndim() != 2 || g.shape(1) != 2 || static_cast<std::size_t>(g.shape(0)) != z.size()) {
    throw ParameterError("G must be (N, 2) with N observations");
  }
  LinearSystem s;
  for (std::size_t i = 0; i < z.size(); ++i) s.gradients.push_back({g.data()[2 * i], g.data()[2 * i + 1]});
  s.observations = z;
  return s;
}

py::dict to_dict(const MetricsReport& m) {
  py::dict d;
  if (m.mse) d["mse"] = py::make_tuple(m.mse->x, m.mse->y);
  if (m.bias) d["bias"] = py::make_tuple(m.bias->x, m.bias->y);
  d["imc_db"] = m.imc_db;
  d["mean_sq_dfd"] = m.mean_sq_dfd;
  d["mean_sq_fd"] = m.mean_sq_fd;
  d["per_pair_imc_db"] = m.per_pair_imc_db;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pel-recursive motion estimation with GCV-selected regularization";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.attr("algorithms") = [] {
    std::vector<std::string> v;
    for (auto a : kAllAlgorithms) v.emplace_back(to_string(a));
    return v;
  }();

  m.def("load_pgm", [](const std::filesystem::path& p) { return from_frame(load_pgm(p)); });
  m.def("save_pgm", [](const Image& a, const std::filesystem::path& p) { save_pgm(to_frame(a), p); });
  m.def("load_flo", [](const std::filesystem::path& p) { return from_flow(load_flo(p)); });
  m.def("save_flo", [](const Field& a, const std::filesystem::path& p) { save_flo(to_flow(a), p); });

  m.def(
      "synthesize",
      [](const py::kwargs& kw) {
        RectSceneParams p;
        for (const auto& [k, v] : kw) {
          const auto key = k.cast<std::string>();
          if (key == "width") p.width = v.cast<int>();
          else if (key == "height") p.height = v.cast<int>();
          else if (key == "rect_x") p.rect_x = v.cast<int>();
          else if (key == "rect_y") p.rect_y = v.cast<int>();
          else if (key == "rect_width") p.rect_width = v.cast<int>();
          else if (key == "rect_height") p.rect_height = v.cast<int>();
          else if (key == "background_dx") p.background_dx = v.cast<int>();
          else if (key == "background_dy") p.background_dy = v.cast<int>();
          else if (key == "rect_dx") p.rect_dx = v.cast<int>();
          else if (key == "rect_dy") p.rect_dy = v.cast<int>();
          else if (key == "frames") p.frames = v.cast<int>();
          else if (key == "seed") p.seed = v.cast<std::uint64_t>();
          else if (key == "texture") p.texture_scaling = parse_texture_scaling(v.cast<std::string>());
          else throw ParameterError("unknown scene option '" + key + "'");
        }
        const auto s = gen_rect_sequence(p);
        std::vector<Image> f;
        for (const auto& fr : s.frames) f.push_back(from_frame(fr));
        std::vector<Field> t;
        for (const auto& fl : s.truth) t.push_back(from_flow(fl));
        return py::make_tuple(f, t);
      },
      "Moving-rectangle scene; returns (frames, truth) with truth[k] mapping frame k+1 back to frame k.");

  m.def(
      "add_noise", [](const Image& f, double snr_db, std::uint64_t seed) { return from_frame(add_noise(to_frame(f), snr_db, seed)); },
      py::arg("frame"), py::arg("snr_db"), py::arg("seed") = 1);

  m.def(
      "estimate",
      [](const Image& cur, const Image& prev, const std::string& algorithm, std::optional<Field> prior,
         const py::kwargs& kw) {
        const auto cfg = make_config(algorithm, kw);
        std::optional<FlowField> p;
        if (prior) p = to_flow(*prior);
        const auto e = estimate_frame_pair(to_frame(cur), to_frame(prev), cfg, p ? &*p : nullptr);
        py::array_t<std::uint8_t> status({e.flow.height(), e.flow.width()});
        for (std::size_t i = 0; i < e.status.size(); ++i) status.mutable_data()[i] = static_cast<std::uint8_t>(e.status[i]);
        py::dict d;
        d["flow"] = from_flow(e.flow);
        d["status"] = status;
        d["iterations"] = e.iterations;
        d["reg_fallbacks"] = e.reg_fallbacks;
        return d;
      },
      py::arg("cur"), py::arg("prev"), py::arg("algorithm") = "lscrv2", py::arg("prior") = py::none(),
      "Flow mapping pixels of cur back to prev. status: 0 converged, 1 fallback, 2 stationary.");

  m.def(
      "evaluate",
      [](const std::vector<Image>& frames, const std::vector<Field>& flows, const std::vector<Field>& truth) {
        const auto seq = to_sequence(frames);
        return to_dict(evaluate(seq, to_flows(flows), to_flows(truth)));
      },
      py::arg("frames"), py::arg("flows"), py::arg("truth") = std::vector<Field>{});

  m.def("gcv_value", [](const Field& g, const std::vector<double>& z, double l1, double l2) {
    return gcv_value(to_system(g, z), {l1, l2});
  });
  m.def("rls_solve", [](const Field& g, const std::vector<double>& z, double l1, double l2) {
    const auto u = rls_solve(to_system(g, z), {l1, l2});
    return py::make_tuple(u.x, u.y);
  });
  m.def(
      "wiener_solve",
      [](const Field& g, const std::vector<double>& z, double mu) {
        const auto u = wiener_solve(to_system(g, z), mu);
        return py::make_tuple(u.x, u.y);
      },
      py::arg("G"), py::arg("z"), py::arg("mu") = 50.0);
  m.def("minimize_gcv", [](const Field& g, const std::vector<double>& z, bool diagonal) -> py::object {
    const auto s = to_system(g, z);
    const auto fit = diagonal ? minimize_gcv_diag(s) : minimize_gcv_scalar(s);
    if (!fit) return py::none();
    return py::make_tuple(fit->reg.lambda1, fit->reg.lambda2, fit->gcv);
  }, py::arg("G"), py::arg("z"), py::arg("diagonal") = false);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Run the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
