#include "occert/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace occert::cli {

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::config, "field '" + field + "': " + what);
}

void reject_unknown_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) config_error(where + item.key(), "unknown key");
}

double number_field(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_number()) config_error(where + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(where + key, "expected a finite number");
  return d;
}

Vec vector_field(const Json& obj, const std::string& key, int size, const std::string& where) {
  if (!obj.contains(key)) config_error(where + key, "missing");
  const Json& v = obj.at(key);
  if (!v.is_array() || static_cast<int>(v.size()) != size)
    config_error(where + key, "expected an array of " + std::to_string(size) + " numbers");
  Vec out(size);
  for (int i = 0; i < size; ++i) {
    if (!v[i].is_number()) config_error(where + key, "expected an array of numbers");
    out(i) = v[i].get<double>();
    if (!std::isfinite(out(i))) config_error(where + key, "expected finite numbers");
  }
  return out;
}

int int_field(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) config_error(where + key, "expected an integer");
  return v.get<int>();
}

Json vec_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json mat_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec_json(m.row(i).transpose()));
  return out;
}

Json doubles_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double d : v) out.push_back(d);
  return out;
}

std::uint64_t point_seed(std::uint64_t seed, int index, std::uint64_t salt) {
  return Rng::mix(Rng::mix(seed ^ salt) + static_cast<std::uint64_t>(index));
}

CertifyOptions certify_options(const RunConfig& config, int index) {
  CertifyOptions opt;
  opt.bhl = config.has_check("bhl");
  opt.p_sufficient = config.has_check("p_sufficient");
  opt.p_refute = config.has_check("p_refute");
  opt.lemma_ll = config.has_check("lemma_ll_demo");
  opt.refute.multistarts = config.multistarts;
  opt.refute.tolerance = config.tol;
  opt.refute.seed = point_seed(config.seed, index, 0x7265667574650000ULL);
  opt.sup_norm.multistarts = config.multistarts;
  opt.sup_norm.seed = point_seed(config.seed, index, 0x7375706e6f726d00ULL);
  return opt;
}

std::string point_verdict(const RunConfig& config, const Certificate& cert) {
  bool refuted = cert.p_membership == PStatus::refuted;
  bool certified = true;
  if (config.has_check("bhl") && cert.bhl) {
    if (!cert.bhl->pass) {
      certified = false;
      if (!cert.bhl->boundary) refuted = true;
    }
  }
  if (config.has_check("p_sufficient") || config.has_check("p_refute"))
    certified = certified && cert.p_membership == PStatus::certified;
  if (refuted) return "refuted";
  return certified ? "certified" : "unknown";
}

template <class Fill>
Report run_points(const RunConfig& config, Fill fill) {
  config.validate();
  Report report;
  report.config = config;
  const std::vector<ChartPoint> samples = sample_points(config.points, config.seed);
  report.points.resize(samples.size());
  parallel_for(static_cast<int>(samples.size()), [&](int i) {
    PointRecord& rec = report.points[static_cast<std::size_t>(i)];
    rec.index = i;
    rec.point = samples[static_cast<std::size_t>(i)];
    try {
      fill(rec);
      rec.ok = true;
    } catch (const Error& e) {
      rec.error_kind = to_string(e.kind());
      rec.error_message = e.what();
    } catch (const std::exception& e) {
      rec.error_kind = "internal";
      rec.error_message = e.what();
    }
  });
  return report;
}

double fd_symmetry_tolerance(const FDConfig& fd, const CurvatureTensor& R) {
  return 100.0 * fd.h * fd.h * std::max(1.0, R.max_abs_component());
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> checks{"bhl", "p_sufficient", "p_refute", "lemma_ll_demo"};
  return checks;
}

bool RunConfig::has_check(const std::string& name) const {
  return std::find(checks.begin(), checks.end(), name) != checks.end();
}

void RunConfig::validate() const {
  if (command != "certify" && command != "spectrum" && command != "selftest")
    config_error("command", "unknown command '" + command + "'");
  if (points < 1) config_error("points", "must be at least 1");
  if (multistarts < 1) config_error("multistarts", "must be at least 1");
  if (!(tol > 0.0) || !std::isfinite(tol)) config_error("tol", "must be positive");
  if (!(fd.h >= 1e-6 && fd.h <= 1e-1)) config_error("fd-step", "must lie in [1e-6, 1e-1]");
  if (checks.empty()) config_error("checks", "at least one check is required");
  for (const auto& c : checks)
    if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end())
      config_error("checks", "unknown check '" + c + "'");
}

MetricField parse_metric_spec(const Json& spec) {
  if (!spec.is_object()) config_error("metric", "expected a JSON object");
  if (!spec.contains("family")) config_error("family", "missing");
  if (!spec.at("family").is_string()) config_error("family", "expected a string");
  const std::string family = spec.at("family").get<std::string>();

  MetricField field;
  if (family == "round") {
    reject_unknown_keys(spec, {"family", "scale"}, "");
  } else if (family == "conformal") {
    reject_unknown_keys(spec, {"family", "scale", "f"}, "");
    if (!spec.contains("f") || !spec.at("f").is_object()) config_error("f", "expected an object");
    const Json& f = spec.at("f");
    reject_unknown_keys(f, {"type", "coeffs"}, "f.");
    if (!f.contains("type") || f.at("type") != "ambient_linear")
      config_error("f.type", "only \"ambient_linear\" is supported");
    field = MetricField::conformal_linear(vector_field(f, "coeffs", 7, "f."));
  } else if (family == "ellipsoid") {
    reject_unknown_keys(spec, {"family", "scale", "semi_axes"}, "");
    const Vec axes = vector_field(spec, "semi_axes", 7, "");
    if (!(axes.minCoeff() > 0.0)) config_error("semi_axes", "must be positive");
    field = MetricField::ellipsoid(axes);
  } else if (family == "custom") {
    reject_unknown_keys(spec, {"family", "scale", "terms"}, "");
    if (!spec.contains("terms") || !spec.at("terms").is_array() || spec.at("terms").empty())
      config_error("terms", "expected a non-empty array");
    std::vector<PolynomialTerm> terms;
    for (std::size_t t = 0; t < spec.at("terms").size(); ++t) {
      const Json& term = spec.at("terms")[t];
      const std::string where = "terms[" + std::to_string(t) + "].";
      if (!term.is_object()) config_error(where, "expected an object");
      reject_unknown_keys(term, {"i", "j", "coeff", "powers"}, where);
      for (const char* key : {"i", "j", "coeff"})
        if (!term.contains(key)) config_error(where + key, "missing");
      PolynomialTerm pt;
      pt.i = int_field(term, "i", where);
      pt.j = int_field(term, "j", where);
      if (pt.i < 0 || pt.i > 5) config_error(where + "i", "must lie in 0..5");
      if (pt.j < 0 || pt.j > 5) config_error(where + "j", "must lie in 0..5");
      pt.coeff = number_field(term, "coeff", where);
      if (term.contains("powers")) {
        const Json& pw = term.at("powers");
        if (!pw.is_array() || pw.size() != 6) config_error(where + "powers", "expected 6 non-negative integers");
        for (int k = 0; k < 6; ++k) {
          if (!pw[k].is_number_integer() || pw[k].get<int>() < 0)
            config_error(where + "powers", "expected 6 non-negative integers");
          pt.powers[k] = pw[k].get<int>();
        }
      }
      terms.push_back(pt);
    }
    field = MetricField::custom(std::move(terms));
  } else {
    config_error("family", "unknown family '" + family + "'");
  }
  if (spec.contains("scale")) {
    field.scale = number_field(spec, "scale", "");
    if (!(field.scale > 0.0)) config_error("scale", "must be positive");
  }
  return field;
}

Json metric_to_json(const MetricField& field) {
  Json out;
  out["family"] = to_string(field.family);
  out["scale"] = field.scale;
  switch (field.family) {
    case MetricField::Family::round:
      break;
    case MetricField::Family::conformal:
      out["f"] = Json{{"type", "ambient_linear"}, {"coeffs", vec_json(field.conformal_coeffs)}};
      break;
    case MetricField::Family::ellipsoid:
      out["semi_axes"] = vec_json(field.semi_axes);
      break;
    case MetricField::Family::custom: {
      Json terms = Json::array();
      for (const auto& t : field.custom_terms) {
        Json powers = Json::array();
        for (int p : t.powers) powers.push_back(p);
        terms.push_back(Json{{"i", t.i}, {"j", t.j}, {"coeff", t.coeff}, {"powers", powers}});
      }
      out["terms"] = terms;
      break;
    }
  }
  return out;
}

Json metric_spec_from_flag(const std::string& value) {
  const auto first = value.find_first_not_of(" \t\n");
  if (first != std::string::npos && value[first] == '{') {
    try {
      return Json::parse(value);
    } catch (const Json::parse_error& e) {
      config_error("metric", std::string("malformed JSON: ") + e.what());
    }
  }
  if (value == "round") return Json{{"family", "round"}};
  if (value == "flat") return metric_to_json(MetricField::flat());
  if (value == "conformal" || value == "ellipsoid" || value == "custom")
    config_error("metric", "family '" + value + "' needs parameters; pass them with --spec or inline JSON");
  config_error("family", "unknown family '" + value + "'");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    config_error("spec", std::string("malformed JSON: ") + e.what());
  }
}

Report run_certify(const RunConfig& config) {
  Report report = run_points(config, [&config](PointRecord& rec) {
    const CurvatureTensor R = riemann(config.metric, rec.point, config.fd);
    CertifyOptions opt = certify_options(config, rec.index);
    opt.symmetry_tolerance = fd_symmetry_tolerance(config.fd, R);
    // riemann already works in a g-orthonormal frame.
    rec.certificate = certify_point(R, Mat::Identity(6, 6), opt);
    rec.verdict = point_verdict(config, *rec.certificate);
  });

  bool any_refuted = false, all_certified = true;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& rec : report.points) {
    any_refuted = any_refuted || rec.verdict == "refuted";
    all_certified = all_certified && rec.verdict == "certified";
    if (rec.certificate) {
      const auto& op = rec.certificate->curvature_operator;
      report.min_margin = std::min(report.min_margin, 7.0 * op.lambda_min() - 5.0 * op.lambda_max());
    }
  }
  if (any_refuted) {
    report.verdict = "refuted with witness";
    report.exit_code = exit_refuted;
  } else if (all_certified) {
    report.verdict = "hypotheses certified at all sampled points";
    report.exit_code = exit_certified;
  } else {
    report.verdict = "undecided at some sampled points";
    report.exit_code = exit_unknown;
  }
  return report;
}

Report run_spectrum(const RunConfig& config) {
  Report report = run_points(config, [&config](PointRecord& rec) {
    const CurvatureTensor R = riemann(config.metric, rec.point, config.fd);
    Certificate cert;
    cert.curvature_operator = curvature_operator(R, fd_symmetry_tolerance(config.fd, R));
    rec.certificate = cert;
    rec.verdict = "spectrum";
  });
  report.min_margin = std::numeric_limits<double>::infinity();
  bool all_ok = true;
  for (const auto& rec : report.points) {
    all_ok = all_ok && rec.ok;
    if (rec.certificate) {
      const auto& op = rec.certificate->curvature_operator;
      report.min_margin = std::min(report.min_margin, 7.0 * op.lambda_min() - 5.0 * op.lambda_max());
    }
  }
  report.verdict = all_ok ? "spectra computed" : "spectra failed at some sampled points";
  report.exit_code = all_ok ? exit_certified : exit_unknown;
  return report;
}

Json report_to_json(const Report& report) {
  const RunConfig& c = report.config;
  Json out;
  out["tool"] = "occert";
  out["version"] = kVersion;
  out["command"] = c.command;

  Json cfg;
  cfg["metric"] = metric_to_json(c.metric);
  cfg["points"] = c.points;
  cfg["seed"] = c.seed;
  cfg["fd"] = Json{{"h", c.fd.h}, {"scheme", c.fd.scheme == FDScheme::central_2nd ? "central_2nd" : "richardson_4th"}};
  cfg["multistarts"] = c.multistarts;
  cfg["tol"] = c.tol;
  cfg["checks"] = c.checks;
  out["config"] = cfg;

  Json points = Json::array();
  for (const auto& rec : report.points) {
    Json p;
    p["index"] = rec.index;
    p["chart"] = to_string(rec.point.chart);
    p["x"] = vec_json(rec.point.x);
    p["ambient"] = vec_json(ambient_point(rec.point));
    p["status"] = rec.ok ? "ok" : "error";
    p["verdict"] = rec.ok ? rec.verdict : "unknown";
    if (!rec.ok) p["error"] = Json{{"kind", rec.error_kind}, {"message", rec.error_message}};
    if (c.command == "certify") {
      p["refute_seed"] = point_seed(c.seed, rec.index, 0x7265667574650000ULL);
    }
    if (rec.certificate) {
      const Certificate& cert = *rec.certificate;
      p["spectrum"] = doubles_json(cert.curvature_operator.spectrum);
      p["lambda_min"] = cert.curvature_operator.lambda_min();
      p["lambda_max"] = cert.curvature_operator.lambda_max();
      if (c.command == "certify") {
        if (cert.bhl)
          p["bhl"] = Json{{"pass", cert.bhl->pass}, {"boundary", cert.bhl->boundary}, {"margin", cert.bhl->margin}};
        p["sup_norm"] = Json{{"lower", cert.deviation_bounds.lower}, {"upper", cert.deviation_bounds.upper}};
        p["p_membership"] = to_string(cert.p_membership);
        if (cert.sufficient)
          p["sufficient"] = Json{{"status", to_string(cert.sufficient->status)},
                                 {"frobenius_bound", cert.sufficient->frobenius_bound},
                                 {"bound_used", cert.sufficient->bound_used},
                                 {"threshold", cert.sufficient->threshold}};
        if (cert.refute_best_value) p["refute_best_value"] = *cert.refute_best_value;
        if (cert.witness)
          p["witness"] = Json{{"J", mat_json(cert.witness->J.J)}, {"X", vec_json(cert.witness->X)},
                              {"value", cert.witness->value}};
        if (cert.lemma_ll) {
          const auto& l = *cert.lemma_ll;
          p["lemma_ll_demo"] = Json{{"hypotheses_met", l.hypotheses_met}, {"nondegenerate", l.nondegenerate},
                                    {"det", l.det_value}, {"distance", l.distance}, {"radius", l.radius}};
        }
        p["notes"] = cert.notes;
      }
    }
    points.push_back(std::move(p));
  }
  out["points"] = points;

  Json agg;
  int certified = 0, refuted = 0, unknown = 0, errors = 0;
  for (const auto& rec : report.points) {
    if (!rec.ok) ++errors;
    if (rec.verdict == "certified") ++certified;
    else if (rec.verdict == "refuted") ++refuted;
    else if (rec.verdict != "spectrum" || !rec.ok) ++unknown;
  }
  if (std::isfinite(report.min_margin)) agg["min_margin"] = report.min_margin;
  else agg["min_margin"] = nullptr;
  agg["certified"] = certified;
  agg["refuted"] = refuted;
  agg["unknown"] = unknown;
  agg["errors"] = errors;
  agg["verdict"] = report.verdict;
  agg["exit_code"] = report.exit_code;
  out["aggregate"] = agg;
  return out;
}

void emit_report(const Report& report, const std::string& path) {
  const std::string text = report_to_json(report).dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path + "'");
}

void print_summary(const Report& report, std::ostream& os) {
  const bool certify = report.config.command == "certify";
  os << "occert " << report.config.command << ": " << to_string(report.config.metric.family) << " metric, "
     << report.points.size() << " points, seed " << report.config.seed << "\n";
  os << "  idx  chart  lambda_min    lambda_max    7min-5max     " << (certify ? "P          verdict" : "") << "\n";
  const auto old_flags = os.flags();
  const auto old_precision = os.precision();
  for (const auto& rec : report.points) {
    os << "  " << std::setw(3) << rec.index << "  " << std::setw(5) << to_string(rec.point.chart) << "  ";
    if (!rec.ok || !rec.certificate) {
      os << "error (" << rec.error_kind << "): " << rec.error_message << "\n";
      continue;
    }
    const auto& op = rec.certificate->curvature_operator;
    os << std::scientific << std::setprecision(5) << std::setw(12) << op.lambda_min() << "  " << std::setw(12)
       << op.lambda_max() << "  " << std::setw(12) << 7.0 * op.lambda_min() - 5.0 * op.lambda_max();
    if (certify) os << "  " << std::setw(9) << to_string(rec.certificate->p_membership) << "  " << rec.verdict;
    os << "\n";
  }
  os.flags(old_flags);
  os.precision(old_precision);
  os << "verdict: " << report.verdict << " (exit " << report.exit_code << ")\n";
}

int run_selftest(std::ostream& os) {
  int failures = 0;
  auto line = [&](const std::string& name, bool pass, double value) {
    os << (pass ? "PASS " : "FAIL ") << name << " (" << value << ")\n";
    if (!pass) ++failures;
  };
  try {
    double worst = 0.0;
    for (const auto& p : sample_points(5, 1)) {
      const CurvatureTensor R = riemann(MetricField::round(), p, FDConfig{});
      for (double l : curvature_operator(R, 1e-4).spectrum) worst = std::max(worst, std::abs(l - 1.0));
    }
    line("round sphere spectrum near 1", worst < 1e-4, worst);

    const CurvatureTensor K = kulkarni_nomizu_square(Mat::Identity(6, 6));
    Rng rng(2);
    const Mat J = random_orthogonal_complex_structure(rng, Orientation::positive, EuclideanSpace::standard(6)).J;
    const double ric_star = (ricci_star(K, J) - Mat::Identity(6, 6)).cwiseAbs().maxCoeff();
    line("Ric* of g⊼g equals g", ric_star < 1e-12, ric_star);

    Vec e1 = Vec::Zero(7), e2 = Vec::Zero(7), e3 = Vec::Zero(7);
    e1(0) = 1.0;
    e2(1) = 1.0;
    e3(2) = 1.0;
    const double cross = (cross7(e1, e2) - e3).norm();
    line("octonion table e1 x e2 = e3", cross == 0.0, cross);

    const RefuteResult neg = refute_P(-1.0 * K, Mat::Identity(6, 6), RefuteConfig{8, 30, 1e-9, 1e-6, false, 3});
    const double v = neg.witness ? neg.witness->value : 0.0;
    line("refutation of -g⊼g", neg.witness.has_value() && std::abs(v + 1.0) < 1e-6, v);
  } catch (const std::exception& e) {
    os << "FAIL selftest raised: " << e.what() << "\n";
    ++failures;
  }
  os << (failures == 0 ? "selftest passed" : "selftest failed") << "\n";
  return failures == 0 ? exit_certified : exit_failure;
}

}  // namespace occert::cli
