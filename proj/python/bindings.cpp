#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "occert/cli.hpp"
#include "occert/curvature_algebra.hpp"
#include "occert/positivity_certifier.hpp"
#include "occert/sphere_engine.hpp"

namespace py = pybind11;
using namespace occert;

namespace {

using Tensor = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor to_numpy(const CurvatureTensor& R) {
  const py::ssize_t n = R.dim();
  Tensor out({n, n, n, n});
  std::copy(R.data().begin(), R.data().end(), out.mutable_data());
  return out;
}

CurvatureTensor from_numpy(const Tensor& a) {
  if (a.ndim() != 4 || a.shape(0) != a.shape(1) || a.shape(0) != a.shape(2) || a.shape(0) != a.shape(3))
    throw Error(ErrorKind::input, "curvature tensor must have shape (n, n, n, n)");
  CurvatureTensor R(static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), R.data().begin());
  return R;
}

ChartId chart_from(const std::string& s) {
  if (s == "north") return ChartId::north;
  if (s == "south") return ChartId::south;
  throw Error(ErrorKind::input, "chart must be 'north' or 'south'");
}

FDConfig fd_from(double h, bool richardson) {
  FDConfig fd{h, richardson ? FDScheme::richardson_4th : FDScheme::central_2nd};
  fd.validate();
  return fd;
}

py::dict witness_dict(const Witness& w) {
  py::dict d;
  d["J"] = w.J.J;
  d["X"] = w.X;
  d["value"] = w.value;
  return d;
}

// Same keys as the report's config block, plus the command.
cli::RunConfig run_config_from(const cli::Json& j) {
  cli::RunConfig cfg;
  static const std::vector<std::string> allowed{"command", "metric", "points", "seed", "fd",
                                                "multistarts", "tol", "checks"};
  for (const auto& item : j.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw Error(ErrorKind::config, "field '" + item.key() + "': unknown key");
  cfg.command = j.value("command", cfg.command);
  cfg.metric_spec = j.contains("metric") ? j.at("metric") : cli::Json{{"family", "round"}};
  cfg.metric = cli::parse_metric_spec(cfg.metric_spec);
  cfg.metric_spec = cli::metric_to_json(cfg.metric);
  cfg.points = j.value("points", cfg.points);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("fd")) {
    cfg.fd.h = j.at("fd").value("h", cfg.fd.h);
    cfg.fd.scheme = j.at("fd").value("scheme", std::string("central_2nd")) == "richardson_4th"
                        ? FDScheme::richardson_4th
                        : FDScheme::central_2nd;
  }
  cfg.multistarts = j.value("multistarts", cfg.multistarts);
  cfg.tol = j.value("tol", cfg.tol);
  if (j.contains("checks")) cfg.checks = j.at("checks").get<std::vector<std::string>>();
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_occert, m) {
  m.doc() = "Curvature pinching and P-membership certificates for metrics on S^6";
  m.attr("__version__") = cli::kVersion;

  // Messages start with the error kind, e.g. "metric error: ...".
  py::register_exception<Error>(m, "OccertError", PyExc_RuntimeError);

  py::class_<ChartPoint>(m, "ChartPoint")
      .def(py::init([](const std::string& chart, const Vec& x) {
             if (x.size() != 6) throw Error(ErrorKind::input, "x must have 6 entries");
             return ChartPoint{chart_from(chart), x};
           }),
           py::arg("chart"), py::arg("x"))
      .def_property_readonly("chart", [](const ChartPoint& p) { return std::string(to_string(p.chart)); })
      .def_property_readonly("x", [](const ChartPoint& p) { return p.x; })
      .def("ambient", &ambient_point)
      .def("__repr__", [](const ChartPoint& p) {
        return "ChartPoint('" + std::string(to_string(p.chart)) + "', |x|=" + std::to_string(p.x.norm()) + ")";
      });

  m.def("chart_point_from_ambient", &chart_point_from_ambient, py::arg("ambient"));
  m.def("sample_points", &sample_points, py::arg("count"), py::arg("seed"));

  py::class_<MetricField>(m, "Metric")
      .def_static("from_json", [](const std::string& s) { return cli::parse_metric_spec(cli::Json::parse(s)); })
      .def_static("round", &MetricField::round, py::arg("scale") = 1.0)
      .def_static("flat", &MetricField::flat)
      .def_static("conformal_linear", &MetricField::conformal_linear, py::arg("coeffs"))
      .def_static("ellipsoid", &MetricField::ellipsoid, py::arg("semi_axes"))
      .def("to_json", [](const MetricField& f) { return cli::metric_to_json(f).dump(); })
      .def_property_readonly("family", [](const MetricField& f) { return std::string(to_string(f.family)); });

  m.def("chart_metric", &chart_metric, py::arg("metric"), py::arg("point"));
  m.def(
      "riemann",
      [](const MetricField& f, const ChartPoint& p, double h, bool richardson) {
        return to_numpy(riemann(f, p, fd_from(h, richardson)));
      },
      py::arg("metric"), py::arg("point"), py::arg("h") = 1e-3, py::arg("richardson") = false,
      "Curvature tensor at p in a g-orthonormal frame, shape (6, 6, 6, 6).");

  m.def(
      "kulkarni_nomizu_square",
      [](const Mat& g, double k) { return to_numpy(kulkarni_nomizu_square(g, k)); }, py::arg("g"),
      py::arg("k") = 1.0);
  m.def(
      "curvature_spectrum",
      [](const Tensor& R, double tol) { return curvature_operator(from_numpy(R), tol).spectrum; }, py::arg("R"),
      py::arg("symmetry_tolerance") = 1e-6);

  m.def(
      "check_bhl",
      [](const std::vector<double>& spectrum) {
        const BhlResult r = check_bhl(spectrum);
        py::dict d;
        d["pass"] = r.pass;
        d["boundary"] = r.boundary;
        d["lambda_min"] = r.lambda_min;
        d["lambda_max"] = r.lambda_max;
        d["margin"] = r.margin;
        return d;
      },
      py::arg("spectrum"));

  m.def(
      "certify_p_sufficient",
      [](const Tensor& R) {
        const CurvatureTensor T = from_numpy(R);
        const SufficientResult r = certify_P_sufficient(T, Mat::Identity(T.dim(), T.dim()));
        py::dict d;
        d["status"] = to_string(r.status);
        d["frobenius_bound"] = r.frobenius_bound;
        d["threshold"] = r.threshold;
        return d;
      },
      py::arg("R"));

  m.def(
      "refute_p",
      [](const Tensor& R, int multistarts, std::uint64_t seed, bool both_orientations) {
        const CurvatureTensor T = from_numpy(R);
        RefuteConfig cfg;
        cfg.multistarts = multistarts;
        cfg.seed = seed;
        cfg.both_orientations = both_orientations;
        RefuteResult r;
        {
          py::gil_scoped_release release;
          r = refute_P(T, Mat::Identity(T.dim(), T.dim()), cfg);
        }
        py::dict d;
        d["best_value"] = r.best_value;
        d["witness"] = r.witness ? py::object(witness_dict(*r.witness)) : py::none();
        return d;
      },
      py::arg("R"), py::arg("multistarts") = 64, py::arg("seed") = 0x7e5f, py::arg("both_orientations") = false);

  m.def("cross7", &cross7, py::arg("a"), py::arg("b"));
  m.def("g2_structure", &g2_structure, py::arg("p"));

  m.def(
      "run_json",
      [](const std::string& config_json) {
        const cli::RunConfig cfg = run_config_from(cli::Json::parse(config_json));
        cli::Report report;
        {
          py::gil_scoped_release release;
          report = cfg.command == "spectrum" ? cli::run_spectrum(cfg) : cli::run_certify(cfg);
        }
        return cli::report_to_json(report).dump(2);
      },
      py::arg("config_json"), "Runs a certify or spectrum batch and returns the JSON report.");
}
