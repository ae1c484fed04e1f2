#include "occert/sphere_engine.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace occert {

namespace {

constexpr int kDim = 6;

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

ChartPoint shifted(const ChartPoint& p, int k, double h) {
  ChartPoint q = p;
  q.x(k) += h;
  return q;
}

// d_k of a matrix-valued function of the chart coordinates.
template <class F>
Mat derivative(const F& f, const ChartPoint& p, int k, double h, FDScheme scheme) {
  auto central = [&](double s) -> Mat { return (f(shifted(p, k, s)) - f(shifted(p, k, -s))) / (2.0 * s); };
  if (scheme == FDScheme::central_2nd) return central(h);
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

template <class F>
std::vector<Mat> gradient(const F& f, const ChartPoint& p, double h, FDScheme scheme) {
  std::vector<Mat> out;
  out.reserve(kDim);
  for (int k = 0; k < kDim; ++k) out.push_back(derivative(f, p, k, h, scheme));
  return out;
}

double monomial(const Vec& x, const std::array<int, 6>& powers) {
  double v = 1.0;
  for (int i = 0; i < 6; ++i)
    if (powers[i] != 0) v *= std::pow(x(i), powers[i]);
  return v;
}

void require_chart_point(const ChartPoint& p) {
  if (p.x.size() != kDim) throw Error(ErrorKind::input, "chart point needs 6 coordinates");
  if (!p.x.allFinite()) throw Error(ErrorKind::input, "chart point has non-finite coordinates");
}

// Fano-plane triples (1-based) with e_a e_b = e_c.
constexpr std::array<std::array<int, 3>, 7> kFano{{
    {1, 2, 3}, {1, 4, 5}, {1, 7, 6}, {2, 4, 6}, {2, 5, 7}, {3, 4, 7}, {3, 6, 5},
}};

struct CrossTable {
  double c[7][7][7] = {};

  CrossTable() {
    for (const auto& t : kFano) {
      const int a = t[0] - 1, b = t[1] - 1, d = t[2] - 1;
      const int cyc[3][3] = {{a, b, d}, {b, d, a}, {d, a, b}};
      for (const auto& r : cyc) {
        c[r[0]][r[1]][r[2]] = 1.0;
        c[r[1]][r[0]][r[2]] = -1.0;
      }
    }
  }
};

const CrossTable& cross_table() {
  static const CrossTable table;
  return table;
}

}  // namespace

const char* to_string(ChartId id) { return id == ChartId::north ? "north" : "south"; }

const char* to_string(MetricField::Family f) {
  switch (f) {
    case MetricField::Family::round: return "round";
    case MetricField::Family::conformal: return "conformal";
    case MetricField::Family::ellipsoid: return "ellipsoid";
    case MetricField::Family::custom: return "custom";
  }
  return "unknown";
}

Vec ambient_point(const ChartPoint& p) {
  require_chart_point(p);
  const double r2 = p.x.squaredNorm();
  const double s = 1.0 + r2;
  Vec out(7);
  out.head(6) = 2.0 * p.x / s;
  out(6) = (p.chart == ChartId::north ? (r2 - 1.0) : (1.0 - r2)) / s;
  return out;
}

ChartPoint to_chart(const Vec& ambient, ChartId chart) {
  if (ambient.size() != 7) throw Error(ErrorKind::input, "ambient point needs 7 coordinates");
  const double denom = chart == ChartId::north ? 1.0 - ambient(6) : 1.0 + ambient(6);
  if (!(denom > 1e-12)) throw Error(ErrorKind::input, "point is the projection pole of the requested chart");
  ChartPoint out;
  out.chart = chart;
  out.x = ambient.head(6) / denom;
  return out;
}

ChartPoint chart_point_from_ambient(const Vec& ambient) {
  if (ambient.size() != 7) throw Error(ErrorKind::input, "ambient point needs 7 coordinates");
  // The north chart sees the southern hemisphere inside the unit ball.
  return to_chart(ambient, ambient(6) <= 0.0 ? ChartId::north : ChartId::south);
}

Mat chart_jacobian(const ChartPoint& p) {
  require_chart_point(p);
  const double s = 1.0 + p.x.squaredNorm();
  Mat out(7, kDim);
  out.topRows(6) = 2.0 / s * Mat::Identity(6, 6) - 4.0 / (s * s) * p.x * p.x.transpose();
  const double sign = p.chart == ChartId::north ? 1.0 : -1.0;
  out.row(6) = sign * 4.0 / (s * s) * p.x.transpose();
  return out;
}

MetricField MetricField::round(double scale) {
  MetricField f;
  f.scale = scale;
  return f;
}

MetricField MetricField::conformal_linear(const Vec& coeffs) {
  if (coeffs.size() != 7) throw Error(ErrorKind::input, "conformal factor needs 7 ambient coefficients");
  MetricField f;
  f.family = Family::conformal;
  f.conformal_coeffs = coeffs;
  return f;
}

MetricField MetricField::ellipsoid(const Vec& semi_axes) {
  if (semi_axes.size() != 7) throw Error(ErrorKind::input, "ellipsoid needs 7 semi-axes");
  if (!(semi_axes.minCoeff() > 0.0)) throw Error(ErrorKind::input, "ellipsoid semi-axes must be positive");
  MetricField f;
  f.family = Family::ellipsoid;
  f.semi_axes = semi_axes;
  return f;
}

MetricField MetricField::custom(std::vector<PolynomialTerm> terms) {
  for (const auto& t : terms) {
    if (t.i < 0 || t.i >= kDim || t.j < 0 || t.j >= kDim)
      throw Error(ErrorKind::input, "custom metric term index out of range");
    for (int pw : t.powers)
      if (pw < 0) throw Error(ErrorKind::input, "custom metric term has a negative power");
  }
  MetricField f;
  f.family = Family::custom;
  f.custom_terms = std::move(terms);
  return f;
}

MetricField MetricField::flat() {
  std::vector<PolynomialTerm> terms;
  for (int i = 0; i < kDim; ++i) terms.push_back(PolynomialTerm{i, i, 1.0, {}});
  return custom(std::move(terms));
}

Mat MetricField::evaluate(const ChartPoint& p) const {
  require_chart_point(p);
  const double s = 1.0 + p.x.squaredNorm();
  const Mat round = 4.0 / (s * s) * Mat::Identity(kDim, kDim);
  Mat g;
  switch (family) {
    case Family::round:
      g = round;
      break;
    case Family::conformal:
      g = std::exp(2.0 * conformal_coeffs.dot(ambient_point(p))) * round;
      break;
    case Family::ellipsoid: {
      const Mat phi = semi_axes.asDiagonal() * chart_jacobian(p);
      g = phi.transpose() * phi;
      break;
    }
    case Family::custom:
      g = Mat::Zero(kDim, kDim);
      for (const auto& t : custom_terms) {
        const double v = t.coeff * monomial(p.x, t.powers);
        g(t.i, t.j) += v;
        if (t.i != t.j) g(t.j, t.i) += v;
      }
      break;
  }
  return scale * g;
}

Mat chart_metric(const MetricField& field, const ChartPoint& p) {
  if (!(field.scale > 0.0)) throw Error(ErrorKind::metric, "metric scale must be positive");
  const Mat g = field.evaluate(p);
  if (!g.allFinite()) throw Error(ErrorKind::metric, "metric has non-finite entries");
  if (max_abs(g - g.transpose()) > 1e-12 * std::max(1.0, max_abs(g)))
    throw Error(ErrorKind::metric, "metric is not symmetric");
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::metric, "metric is not positive definite");
  return g;
}

void FDConfig::validate() const {
  if (!(h >= 1e-6 && h <= 1e-1))
    throw Error(ErrorKind::config, "finite-difference step must lie in [1e-6, 1e-1], got " + std::to_string(h));
}

Mat ConnectionCoefficients::along(int k) const {
  const int n = static_cast<int>(gamma.size());
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = gamma[i](k, j);
  return out;
}

namespace {

// Gamma^k_{ij} from g and its first derivatives.
std::vector<Mat> levi_civita(const Mat& g, const std::vector<Mat>& dg) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (!(ev(0) > 0.0) || ev(ev.size() - 1) / ev(0) > 1e12)
    throw Error(ErrorKind::conditioning, "metric is too close to singular for Christoffel symbols");
  const Mat ginv = g.inverse();
  // lowered(l)(i,j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<Mat> lowered(kDim, Mat::Zero(kDim, kDim));
  for (int l = 0; l < kDim; ++l)
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        const double v = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        lowered[l](i, j) = v;
        lowered[l](j, i) = v;
      }
  std::vector<Mat> gamma(kDim, Mat::Zero(kDim, kDim));
  for (int k = 0; k < kDim; ++k)
    for (int l = 0; l < kDim; ++l)
      if (ginv(k, l) != 0.0) gamma[k] += ginv(k, l) * lowered[l];
  return gamma;
}

ConnectionCoefficients christoffel_at(const MetricField& field, const ChartPoint& p, const FDConfig& fd) {
  auto metric = [&](const ChartPoint& q) { return chart_metric(field, q); };
  ConnectionCoefficients out;
  out.metric = metric(p);
  out.dmetric = gradient(metric, p, fd.h, fd.scheme);
  out.gamma = levi_civita(out.metric, out.dmetric);
  return out;
}

// Coordinate d_k J for the chart representation of the J-field.
std::vector<Mat> acs_gradient(const ACSField& acs, const ChartPoint& p, double h, FDScheme scheme) {
  auto f = [&](const ChartPoint& q) { return acs.chart_matrix(q); };
  return gradient(f, p, h, scheme);
}

// D_k = d_k J + Gamma_k J - J Gamma_k, coordinate components of nabla_{d_k} J.
std::vector<Mat> coordinate_nabla_j(const ConnectionCoefficients& conn, const Mat& J, const std::vector<Mat>& dJ) {
  std::vector<Mat> out;
  out.reserve(kDim);
  for (int k = 0; k < kDim; ++k) {
    const Mat G = conn.along(k);
    out.push_back(dJ[k] + G * J - J * G);
  }
  return out;
}

}  // namespace

ConnectionCoefficients christoffel(const MetricField& field, const ChartPoint& p, const FDConfig& fd) {
  fd.validate();
  return christoffel_at(field, p, fd);
}

double metricity_residual(const MetricField& field, const ChartPoint& p, const FDConfig& fd) {
  const ConnectionCoefficients conn = christoffel(field, p, fd);
  auto metric = [&](const ChartPoint& q) { return chart_metric(field, q); };
  double worst = 0.0;
  for (int k = 0; k < kDim; ++k) {
    const Mat dg = derivative(metric, p, k, 0.5 * fd.h, fd.scheme);
    const Mat G = conn.along(k);
    worst = std::max(worst, max_abs(dg - G.transpose() * conn.metric - conn.metric * G));
  }
  return worst;
}

CurvatureTensor riemann_coordinates(const MetricField& field, const ChartPoint& p, const FDConfig& fd) {
  fd.validate();
  const ConnectionCoefficients conn = christoffel_at(field, p, fd);
  // dgamma[m][k](i,j) = d_m Gamma^k_{ij}
  std::vector<std::vector<Mat>> dgamma(kDim);
  for (int m = 0; m < kDim; ++m) {
    // One christoffel evaluation per shifted point, stacked over k.
    auto all = [&](const ChartPoint& q) {
      const auto c = christoffel_at(field, q, fd);
      Mat stacked(kDim * kDim, kDim);
      for (int k = 0; k < kDim; ++k) stacked.block(k * kDim, 0, kDim, kDim) = c.gamma[k];
      return stacked;
    };
    const Mat d = derivative(all, p, m, fd.h, fd.scheme);
    for (int k = 0; k < kDim; ++k) dgamma[m].push_back(d.block(k * kDim, 0, kDim, kDim));
  }
  // R(d_i,d_j) d_l = Rup^m_{ijl} d_m with
  // Rup^m_{ijl} = d_i G^m_{jl} - d_j G^m_{il} + G^m_{ir} G^r_{jl} - G^m_{jr} G^r_{il}.
  CurvatureTensor out(kDim);
  const auto& G = conn.gamma;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      if (i == j) continue;
      Mat up(kDim, kDim);  // up(m, l)
      for (int m = 0; m < kDim; ++m)
        for (int l = 0; l < kDim; ++l) {
          double v = dgamma[i][m](j, l) - dgamma[j][m](i, l);
          for (int r = 0; r < kDim; ++r) v += G[m](i, r) * G[r](j, l) - G[m](j, r) * G[r](i, l);
          up(m, l) = v;
        }
      // R(i,j,k,l) = g(R(d_i,d_j) d_l, d_k)
      const Mat lowered = conn.metric * up;
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) out(i, j, k, l) = lowered(k, l);
    }
  return out;
}

CurvatureTensor riemann(const MetricField& field, const ChartPoint& p, const FDConfig& fd) {
  const CurvatureTensor coords = riemann_coordinates(field, p, fd);
  const EuclideanSpace space = EuclideanSpace::with_metric(chart_metric(field, p));
  const CurvatureTensor R = coords.in_frame(space.orthonormal_frame());
  const double violation = validate_symmetries(R).max();
  const double allowed = 100.0 * fd.h * fd.h * std::max(1.0, R.max_abs_component());
  if (violation > allowed)
    throw Error(ErrorKind::finite_difference_quality,
                "curvature symmetry violation " + std::to_string(violation) + " exceeds " + std::to_string(allowed));
  return R;
}

double g2_structure_constant(int a, int b, int c) {
  if (a < 0 || a >= 7 || b < 0 || b >= 7 || c < 0 || c >= 7) throw Error(ErrorKind::input, "index out of range");
  return cross_table().c[a][b][c];
}

Vec cross7(const Vec& a, const Vec& b) {
  if (a.size() != 7 || b.size() != 7) throw Error(ErrorKind::input, "cross product needs 7-vectors");
  const auto& t = cross_table();
  Vec out = Vec::Zero(7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const double ab = a(i) * b(j);
      if (ab == 0.0) continue;
      for (int k = 0; k < 7; ++k) out(k) += t.c[i][j][k] * ab;
    }
  return out;
}

Mat g2_structure(const Vec& p) {
  if (p.size() != 7) throw Error(ErrorKind::input, "ambient point needs 7 coordinates");
  if (std::abs(p.norm() - 1.0) > 1e-9) throw Error(ErrorKind::input, "ambient point is not on the unit sphere");
  const auto& t = cross_table();
  Mat out = Mat::Zero(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      for (int k = 0; k < 7; ++k) out(k, j) += t.c[i][j][k] * p(i);
  return out;
}

ACSField ACSField::constant(const Mat& J_chart) {
  if (J_chart.rows() != kDim || J_chart.cols() != kDim) throw Error(ErrorKind::input, "J must be 6 x 6");
  ACSField out;
  out.kind = Kind::custom;
  out.evaluator = [J_chart](const ChartPoint&) { return J_chart; };
  return out;
}

Mat ACSField::chart_matrix(const ChartPoint& p) const {
  if (kind == Kind::custom) {
    if (!evaluator) throw Error(ErrorKind::config, "custom almost complex structure has no evaluator");
    Mat J = evaluator(p);
    if (J.rows() != kDim || J.cols() != kDim) throw Error(ErrorKind::input, "J must be 6 x 6");
    return J;
  }
  const Mat phi = chart_jacobian(p);
  const Mat P = g2_structure(ambient_point(p));
  // The image of P phi lies in the tangent space, so the normal equations recover it exactly.
  return (phi.transpose() * phi).ldlt().solve(phi.transpose() * P * phi);
}

NablaJResult nabla_J(const MetricField& field, const ACSField& acs, const ChartPoint& p, const FDConfig& fd) {
  fd.validate();
  const ConnectionCoefficients conn = christoffel_at(field, p, fd);
  const Mat Jc = acs.chart_matrix(p);
  const std::vector<Mat> D = coordinate_nabla_j(conn, Jc, acs_gradient(acs, p, fd.h, fd.scheme));

  NablaJResult out;
  out.frame = EuclideanSpace::with_metric(conn.metric).orthonormal_frame();
  const Mat& E = out.frame;
  const Mat Einv = E.inverse();
  out.J = Einv * Jc * E;
  out.nabla.d.assign(kDim, Mat::Zero(kDim, kDim));
  for (int a = 0; a < kDim; ++a) {
    Mat coord = Mat::Zero(kDim, kDim);
    for (int k = 0; k < kDim; ++k) coord += E(k, a) * D[k];
    out.nabla.d[a] = Einv * coord * E;
  }
  return out;
}

CanonicalConnectionReport canonical_connection_check(const MetricField& field, const ACSField& acs,
                                                     const ChartPoint& p, const FDConfig& fd) {
  fd.validate();
  const ConnectionCoefficients conn = christoffel_at(field, p, fd);
  const Mat& g = conn.metric;
  const Mat J = acs.chart_matrix(p);
  const std::vector<Mat> D = coordinate_nabla_j(conn, J, acs_gradient(acs, p, fd.h, fd.scheme));

  // Delta_k = Gamma_k - 1/2 J D_k, so that Delta_X Y = nabla_X Y - 1/2 J (nabla_X J) Y.
  std::vector<Mat> delta;
  for (int k = 0; k < kDim; ++k) delta.push_back(conn.along(k) - 0.5 * J * D[k]);

  // Derivatives at half the step keep the residuals independent of the ones used to build Delta.
  auto metric = [&](const ChartPoint& q) { return chart_metric(field, q); };
  const std::vector<Mat> dg = gradient(metric, p, 0.5 * fd.h, fd.scheme);
  const std::vector<Mat> dJ = acs_gradient(acs, p, 0.5 * fd.h, fd.scheme);

  CanonicalConnectionReport out;
  for (int k = 0; k < kDim; ++k) {
    out.metric_residual = std::max(out.metric_residual, max_abs(dg[k] - delta[k].transpose() * g - g * delta[k]));
    out.complex_residual = std::max(out.complex_residual, max_abs(dJ[k] + delta[k] * J - J * delta[k]));
  }

  // T(d_k, d_j)^i: direct antisymmetrization against 1/2 ((nabla_k J) J d_j - (nabla_j J) J d_k).
  const Mat E = EuclideanSpace::with_metric(g).orthonormal_frame();
  const Mat Einv = E.inverse();
  double torsion_sq = 0.0;
  for (int k = 0; k < kDim; ++k)
    for (int j = 0; j < kDim; ++j) {
      const Vec direct = delta[k].col(j) - delta[j].col(k);
      const Vec formula = 0.5 * ((D[k] * J).col(j) - (D[j] * J).col(k));
      out.torsion_formula_residual = std::max(out.torsion_formula_residual, (direct - formula).cwiseAbs().maxCoeff());
    }
  // Norm of T in the orthonormal frame.
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      Vec t = Vec::Zero(kDim);
      for (int k = 0; k < kDim; ++k)
        for (int j = 0; j < kDim; ++j) {
          const double w = E(k, a) * E(j, b);
          if (w != 0.0) t += w * (delta[k].col(j) - delta[j].col(k));
        }
      torsion_sq += (Einv * t).squaredNorm();
    }
  out.torsion_norm = std::sqrt(torsion_sq);
  out.threshold = 100.0 * fd.h * fd.h;
  out.passed = out.metric_residual < out.threshold && out.complex_residual < out.threshold &&
               out.torsion_formula_residual < out.threshold;
  return out;
}

std::vector<ChartPoint> sample_points(int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::input, "need at least one sample point");
  Rng rng(seed, 0x5a3b);
  std::vector<ChartPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(chart_point_from_ambient(rng.unit_vector(7)));
  return out;
}

}  // namespace occert
