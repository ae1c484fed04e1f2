#include <doctest.h>

#include <cmath>

#include "occert/positivity_certifier.hpp"
#include "occert/sphere_engine.hpp"
#include "support.hpp"

using namespace occert;
using occert::test::max_abs;

namespace {

const Mat kId = Mat::Identity(6, 6);

ChartPoint random_chart_point(Rng& rng, double radius = 1.0) {
  ChartPoint p;
  p.chart = rng.uniform() < 0.5 ? ChartId::north : ChartId::south;
  p.x = rng.unit_vector(6) * radius * std::pow(rng.uniform(), 1.0 / 6.0);
  return p;
}

Mat round_oracle(const Vec& x) { return 4.0 / std::pow(1.0 + x.squaredNorm(), 2) * kId; }

// Central differences of the ambient embedding.
Mat numerical_jacobian(const ChartPoint& p, double h = 1e-6) {
  Mat out(7, 6);
  for (int k = 0; k < 6; ++k) {
    ChartPoint a = p, b = p;
    a.x(k) += h;
    b.x(k) -= h;
    out.col(k) = (ambient_point(a) - ambient_point(b)) / (2.0 * h);
  }
  return out;
}

// Conformally flat g = e^{2u} delta with u = log(2 / (1 + |x|^2)):
// Gamma^k_ij = delta_ik u_j + delta_jk u_i - delta_ij u_k.
std::vector<Mat> round_christoffel_oracle(const Vec& x) {
  const Vec du = -2.0 * x / (1.0 + x.squaredNorm());
  std::vector<Mat> G(6, Mat::Zero(6, 6));
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) G[k](i, j) = (i == k) * du(j) + (j == k) * du(i) - (i == j) * du(k);
  return G;
}

// Gauss equation for the ellipsoid A S^6: II = -g_round / |A^-1 p|, hence
// R = g_round⊼g_round / |A^-1 p|^2 in chart coordinates.
CurvatureTensor ellipsoid_oracle(const Vec& axes, const ChartPoint& p) {
  const Vec q = ambient_point(p).cwiseQuotient(axes);
  return kulkarni_nomizu_square(round_oracle(p.x), 1.0 / q.squaredNorm());
}

double max_component_diff(const CurvatureTensor& a, const CurvatureTensor& b) {
  return (a - b).max_abs_component();
}

Vec test_axes() {
  Vec a(7);
  a << 1.0, 1.1, 0.95, 1.05, 1.0, 0.9, 1.2;
  return a;
}

FDConfig richardson(double h = 1e-3) { return FDConfig{h, FDScheme::richardson_4th}; }

}  // namespace

TEST_SUITE("sphere_engine") {

TEST_CASE("stereographic charts land on the unit sphere and invert") {
  Rng rng(51);
  for (int t = 0; t < 200; ++t) {
    const ChartPoint p = random_chart_point(rng, 1.5);
    const Vec a = ambient_point(p);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_abs(to_chart(a, p.chart).x - p.x) < 1e-12);
    const ChartPoint q = chart_point_from_ambient(a);
    CHECK(q.x.norm() <= 1.0 + 1e-12);
    CHECK(max_abs(ambient_point(q) - a) < 1e-12);
    CHECK(max_abs(chart_jacobian(p) - numerical_jacobian(p)) < 1e-8);
  }
  ChartPoint origin;
  Vec south = Vec::Zero(7);
  south(6) = -1.0;
  CHECK(max_abs(ambient_point(origin) - south) == 0.0);
  CHECK_THROWS_AS(to_chart(-south, ChartId::north), Error);
}

TEST_CASE("round metric: 4 Id at the origin and 4/(1+|x|^2)^2 Id elsewhere") {
  CHECK(max_abs(chart_metric(MetricField::round(), ChartPoint{}) - 4.0 * kId) == 0.0);
  Rng rng(52);
  for (int t = 0; t < 100; ++t) {
    const ChartPoint p = random_chart_point(rng, 1.5);
    CHECK(max_abs(chart_metric(MetricField::round(), p) - round_oracle(p.x)) < 1e-14);
    // pullback of the embedding, through a numerically differentiated parametrization
    const Mat phi = numerical_jacobian(p);
    CHECK(max_abs(phi.transpose() * phi - round_oracle(p.x)) < 1e-8);
  }
}

TEST_CASE("degenerate family members reproduce the round metric") {
  Rng rng(53);
  const MetricField conformal0 = MetricField::conformal_linear(Vec::Zero(7));
  const MetricField ellipsoid1 = MetricField::ellipsoid(Vec::Ones(7));
  for (int t = 0; t < 100; ++t) {
    const ChartPoint p = random_chart_point(rng, 1.5);
    const Mat g = chart_metric(MetricField::round(), p);
    CHECK(max_abs(chart_metric(conformal0, p) - g) == 0.0);
    CHECK(max_abs(chart_metric(ellipsoid1, p) - g) < 1e-14);
  }
}

TEST_CASE("conformal factor and scale") {
  Vec c = Vec::Zero(7);
  c(0) = 0.3;
  c(6) = -0.2;
  const MetricField f = MetricField::conformal_linear(c);
  Rng rng(54);
  const ChartPoint p = random_chart_point(rng);
  const double factor = std::exp(2.0 * c.dot(ambient_point(p)));
  CHECK(max_abs(chart_metric(f, p) - factor * round_oracle(p.x)) < 1e-14);
  CHECK(max_abs(chart_metric(MetricField::round(2.5), p) - 2.5 * round_oracle(p.x)) < 1e-14);
}

TEST_CASE("custom metrics: polynomial evaluation and SPD failure") {
  std::vector<PolynomialTerm> terms;
  for (int i = 0; i < 6; ++i) terms.push_back({i, i, 1.0, {}});
  PolynomialTerm off{0, 1, 0.25, {}};
  off.powers[2] = 2;
  terms.push_back(off);
  const MetricField f = MetricField::custom(terms);
  ChartPoint p;
  p.x << 0.1, 0.2, 0.4, 0.0, 0.0, 0.0;
  const Mat g = chart_metric(f, p);
  CHECK(g(0, 1) == doctest::Approx(0.25 * 0.16));
  CHECK(g(1, 0) == g(0, 1));

  std::vector<PolynomialTerm> bad = terms;
  bad[3].coeff = -1.0;
  try {
    chart_metric(MetricField::custom(bad), p);
    FAIL("expected a metric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::metric);
  }
  CHECK_THROWS_AS(MetricField::custom({{6, 0, 1.0, {}}}), Error);
}

TEST_CASE("finite-difference step range") {
  CHECK_NOTHROW(FDConfig{1e-6}.validate());
  CHECK_NOTHROW(FDConfig{1e-1}.validate());
  for (double h : {5e-7, 0.2, -1e-3}) {
    try {
      FDConfig{h}.validate();
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
  }
}

TEST_CASE("Christoffel symbols: flat, round origin, and the conformal formula") {
  Rng rng(55);
  const ConnectionCoefficients flat = christoffel(MetricField::flat(), random_chart_point(rng));
  for (const auto& G : flat.gamma) CHECK(max_abs(G) == 0.0);

  const ConnectionCoefficients origin = christoffel(MetricField::round(), ChartPoint{});
  for (const auto& G : origin.gamma) CHECK(max_abs(G) < 1e-10);

  for (int t = 0; t < 20; ++t) {
    const ChartPoint p = random_chart_point(rng);
    const ConnectionCoefficients c = christoffel(MetricField::round(), p);
    const auto oracle = round_christoffel_oracle(p.x);
    for (int k = 0; k < 6; ++k) {
      CHECK(max_abs(c.gamma[k] - c.gamma[k].transpose()) == 0.0);
      CHECK(max_abs(c.gamma[k] - oracle[k]) < 1e-5);
    }
    const ConnectionCoefficients r = christoffel(MetricField::round(), p, richardson());
    for (int k = 0; k < 6; ++k) CHECK(max_abs(r.gamma[k] - oracle[k]) < 1e-10);
  }
}

TEST_CASE("metricity residual is below 10 h^2") {
  for (const auto& p : sample_points(20, 56)) {
    const double h = 1e-3;
    CHECK(metricity_residual(MetricField::round(), p, FDConfig{h}) < 10.0 * h * h);
    CHECK(metricity_residual(MetricField::ellipsoid(test_axes()), p, FDConfig{h}) < 10.0 * h * h);
  }
}

TEST_CASE("near-singular metrics are a conditioning error") {
  std::vector<PolynomialTerm> terms;
  for (int i = 0; i < 6; ++i) terms.push_back({i, i, i == 0 ? 1e-14 : 1.0, {}});
  try {
    christoffel(MetricField::custom(terms), ChartPoint{});
    FAIL("expected a conditioning error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::conditioning);
  }
}

TEST_CASE("round sphere curvature is g⊼g in orthonormal frames") {
  const CurvatureTensor K = kulkarni_nomizu_square(kId);
  double worst = 0.0, worst_r = 0.0, worst_sym = 0.0;
  for (const auto& p : sample_points(20, 57)) {
    const CurvatureTensor R = riemann(MetricField::round(), p);
    worst = std::max(worst, max_component_diff(R, K));
    worst_sym = std::max(worst_sym, validate_symmetries(R).max());
    worst_r = std::max(worst_r, max_component_diff(riemann(MetricField::round(), p, richardson()), K));
  }
  CHECK(worst < 1e-4);
  CHECK(worst_r < 1e-6);
  CHECK(worst_sym < 10.0 * 1e-6);
}

TEST_CASE("flat custom metric has zero curvature") {
  Rng rng(58);
  const CurvatureTensor R = riemann(MetricField::flat(), random_chart_point(rng));
  CHECK(R.max_abs_component() < 1e-8);
}

TEST_CASE("ellipsoid curvature matches the Gauss equation") {
  const MetricField f = MetricField::ellipsoid(test_axes());
  for (const auto& p : sample_points(10, 59)) {
    const CurvatureTensor oracle = ellipsoid_oracle(test_axes(), p);
    const double scale = oracle.max_abs_component();
    CHECK(max_component_diff(riemann_coordinates(f, p), oracle) < 1e-4 * scale);
    CHECK(max_component_diff(riemann_coordinates(f, p, richardson()), oracle) < 1e-7 * scale);
  }
}

TEST_CASE("step-size convergence is second order") {
  const MetricField f = MetricField::ellipsoid(test_axes());
  for (const auto& p : sample_points(5, 60)) {
    const CurvatureTensor oracle = ellipsoid_oracle(test_axes(), p);
    const double e1 = max_component_diff(riemann_coordinates(f, p, FDConfig{2e-2}), oracle);
    const double e2 = max_component_diff(riemann_coordinates(f, p, FDConfig{1e-2}), oracle);
    CHECK(e1 / e2 >= 3.5);
    const double m1 = metricity_residual(f, p, FDConfig{2e-2});
    const double m2 = metricity_residual(f, p, FDConfig{1e-2});
    CHECK(m1 / m2 >= 3.5);
  }
}

TEST_CASE("small conformal perturbation keeps the spectrum near 1") {
  Vec c = Vec::Zero(7);
  c(0) = 0.01;
  const MetricField f = MetricField::conformal_linear(c);
  for (const auto& p : sample_points(20, 61)) {
    const CurvatureOperator op = curvature_operator(riemann(f, p), 1e-4);
    CHECK(op.lambda_min() > 0.8);
    CHECK(op.lambda_max() < 1.2);
  }
}

TEST_CASE("conformal perturbation: deviation is second order in the coefficient") {
  // Hess p_1 = -p_1 g on the round sphere, so e^{2c p_1} g is, to first order in c,
  // the pull-back of g by a conformal flow: the spectrum moves only at order c^2.
  const ChartPoint p = sample_points(1, 62).front();
  auto deviation = [&](double coeff) {
    Vec c = Vec::Zero(7);
    c(0) = coeff;
    const CurvatureOperator op = curvature_operator(riemann(MetricField::conformal_linear(c), p, richardson()), 1e-4);
    return std::max(std::abs(op.lambda_min() - 1.0), std::abs(op.lambda_max() - 1.0));
  };
  const double d1 = deviation(0.001), d2 = deviation(0.01);
  CHECK(d2 / d1 == doctest::Approx(100.0).epsilon(0.05));
  CHECK(d2 < 0.2);
}

TEST_CASE("charts agree on frame-invariant spectra") {
  const MetricField f = MetricField::ellipsoid(test_axes());
  Rng rng(63);
  for (int t = 0; t < 10; ++t) {
    Vec a = rng.unit_vector(7);
    a(6) = 0.3 * (rng.uniform() - 0.5);  // near the equator, inside both charts
    a.normalize();
    const auto sn = curvature_operator(riemann(f, to_chart(a, ChartId::north), richardson()), 1e-4).spectrum;
    const auto ss = curvature_operator(riemann(f, to_chart(a, ChartId::south), richardson()), 1e-4).spectrum;
    for (int i = 0; i < 15; ++i) CHECK(std::abs(sn[i] - ss[i]) < 1e-6);
  }
}

TEST_CASE("badly resolved curvature is a finite-difference quality error") {
  // Nearly degenerate (g_02 close to 1): the nonlinear terms amplify the
  // truncation error past the symmetry budget.
  std::vector<PolynomialTerm> terms;
  for (int i = 0; i < 6; ++i) terms.push_back({i, i, 1.0, {}});
  terms.push_back({0, 2, 0.99, {}});
  PolynomialTerm bend{0, 2, -10.0, {}};
  bend.powers[1] = 2;
  terms.push_back(bend);
  PolynomialTerm quartic{0, 0, 10.0, {}};
  quartic.powers[3] = 4;
  terms.push_back(quartic);
  ChartPoint p;
  p.x << 0.0, 0.0, 0.0, 0.1, 0.0, 0.0;
  try {
    riemann(MetricField::custom(terms), p, FDConfig{1e-2});
    FAIL("expected a finite-difference quality error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::finite_difference_quality);
  }
  // central differences along different axes commute, so roundoff at the
  // smallest step keeps the symmetries and is not flagged
  CHECK_NOTHROW(riemann(MetricField::round(), sample_points(1, 5).front(), FDConfig{1e-6}));
}

TEST_CASE("octonion table: e1 x e2 = e3, antisymmetry and normalization") {
  Vec e1 = Vec::Zero(7), e2 = Vec::Zero(7), e3 = Vec::Zero(7);
  e1(0) = 1.0;
  e2(1) = 1.0;
  e3(2) = 1.0;
  CHECK(max_abs(cross7(e1, e2) - e3) == 0.0);
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) {
      int nonzero = 0;
      for (int c = 0; c < 7; ++c) {
        const double v = g2_structure_constant(a, b, c);
        CHECK(v == -g2_structure_constant(b, a, c));
        CHECK(v == g2_structure_constant(b, c, a));  // totally antisymmetric
        nonzero += v != 0.0;
        if (v != 0.0) CHECK(std::abs(v) == 1.0);
      }
      CHECK(nonzero == (a == b ? 0 : 1));
    }
  Rng rng(64);
  for (int t = 0; t < 1000; ++t) {
    const Vec u = rng.normal_vector(7), v = rng.normal_vector(7);
    const Vec w = cross7(u, v);
    const double lagrange = u.squaredNorm() * v.squaredNorm() - std::pow(u.dot(v), 2);
    CHECK(std::abs(w.squaredNorm() - lagrange) < 1e-12 * (1 + lagrange));
    CHECK(std::abs(w.dot(u)) < 1e-12 * (1 + w.norm() * u.norm()));
  }
}

TEST_CASE("octonionic J on tangent spaces") {
  Rng rng(65);
  for (int t = 0; t < 20; ++t) {
    const Vec p = rng.unit_vector(7);
    const Mat J = g2_structure(p);
    for (int s = 0; s < 100; ++s) {
      Vec v = rng.normal_vector(7);
      v -= v.dot(p) * p;
      CHECK(std::abs((J * v).dot(p)) < 1e-12);
      CHECK(std::abs((J * v).dot(v)) < 1e-12);
      CHECK((J * (J * v) + v).norm() < 1e-12 * (1 + v.norm()));
    }
  }
  Vec q = Vec::Zero(7);
  q(0) = 1.0 + 1e-6;
  try {
    g2_structure(q);
    FAIL("expected an input error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::input);
  }
}

TEST_CASE("octonionic J is a round-orthogonal complex structure in chart coordinates") {
  Rng rng(66);
  for (int t = 0; t < 20; ++t) {
    const ChartPoint p = random_chart_point(rng);
    const Mat J = ACSField::g2().chart_matrix(p);
    const Mat g = chart_metric(MetricField::round(), p);
    CHECK(max_abs(J * J + kId) < 1e-12);
    CHECK(max_abs(J.transpose() * g * J - g) < 1e-12 * max_abs(g));
  }
}

TEST_CASE("nabla J of the octonionic structure is nearly Kähler") {
  Rng rng(67);
  for (const auto& p : sample_points(10, 68)) {
    const NablaJResult nj = nabla_J(MetricField::round(), ACSField::g2(), p);
    CHECK_NOTHROW(validate_nabla_j(nj.J, nj.nabla, 100.0 * 1e-6));
    // The connection terms cancel in D J + J D; what is left is the error in dJ.
    const NablaJResult fine = nabla_J(MetricField::round(), ACSField::g2(), p, richardson());
    double worst_nk = 0.0, worst_anti = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vec X = rng.normal_vector(6);
      const Mat D = nj.nabla.along(X);
      worst_nk = std::max(worst_nk, (D * X).norm() / X.squaredNorm());
      const Mat F = fine.nabla.along(X);
      worst_anti = std::max(worst_anti, max_abs(F * fine.J + fine.J * F) / X.norm());
    }
    CHECK(worst_nk < 1e-3);
    CHECK(worst_anti < 1e-6);
    CHECK(nj.nabla.along(Vec::Ones(6)).norm() > 0.1);
  }
}

TEST_CASE("nearly Kähler residual decays quadratically with the step") {
  const ChartPoint p = sample_points(1, 69).front();
  Rng rng(70);
  const Vec X = rng.normal_vector(6);
  auto residual = [&](double h) {
    const NablaJResult nj = nabla_J(MetricField::round(), ACSField::g2(), p, FDConfig{h});
    return (nj.nabla.along(X) * X).norm();
  };
  CHECK(residual(2e-2) / residual(1e-2) >= 3.5);
}

TEST_CASE("constant J on the flat chart is parallel") {
  const NablaJResult nj = nabla_J(MetricField::flat(), ACSField::constant(standard_complex_structure_matrix(6)),
                                  ChartPoint{});
  for (const auto& D : nj.nabla.d) CHECK(max_abs(D) == 0.0);
}

TEST_CASE("octonionic fixture: phi(X, JX) > 0 and the Chern form is positive") {
  Rng rng(71);
  for (const auto& p : sample_points(10, 72)) {
    const NablaJResult nj = nabla_J(MetricField::round(), ACSField::g2(), p);
    const TwoForm f = phi(nj.J, nj.nabla, 1e-4);
    for (int t = 0; t < 20; ++t) {
      const Vec X = rng.normal_vector(6);
      CHECK(f(X, nj.J * X) > 0.0);
    }
    const CurvatureTensor R = riemann(MetricField::round(), p);
    const TwoForm g1 = chern_form(R, nj.J, nj.nabla, 1e-4);
    CHECK(is_positive_form(g1, ComplexStructure{nj.J, true}, 1e-4) == FormClass::positive);
  }
}

TEST_CASE("canonical connection: Kähler toy") {
  const CanonicalConnectionReport r = canonical_connection_check(
      MetricField::flat(), ACSField::constant(standard_complex_structure_matrix(6)), ChartPoint{});
  CHECK(r.metric_residual < 1e-10);
  CHECK(r.complex_residual < 1e-10);
  CHECK(r.torsion_formula_residual < 1e-10);
  CHECK(r.torsion_norm == 0.0);
  CHECK(r.passed);
}

TEST_CASE("canonical connection: octonionic fixture has torsion") {
  for (const auto& p : sample_points(10, 73)) {
    const CanonicalConnectionReport r = canonical_connection_check(MetricField::round(), ACSField::g2(), p);
    CHECK(r.complex_residual < 1e-3);
    CHECK(r.metric_residual < r.threshold);
    CHECK(r.torsion_formula_residual < 1e-6);
    CHECK(r.torsion_norm > 0.1);
    CHECK(r.passed);
  }
}

TEST_CASE("sample points: determinism, chart invariant, and uniform mean") {
  const auto a = sample_points(1, 99), b = sample_points(1, 99);
  CHECK(a.front().chart == b.front().chart);
  CHECK(max_abs(a.front().x - b.front().x) == 0.0);

  const int N = 10000;
  const auto pts = sample_points(N, 74);
  Vec mean = Vec::Zero(7);
  for (const auto& p : pts) {
    CHECK(p.x.norm() <= 1.5);
    mean += ambient_point(p);
  }
  mean /= N;
  const double sigma = 1.0 / std::sqrt(7.0 * N);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(mean(i)) < 3.0 * sigma);
  CHECK_THROWS_AS(sample_points(0, 1), Error);
}

}  // TEST_SUITE
