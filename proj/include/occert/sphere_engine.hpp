#pragma once

// Metrics on S^6 in two stereographic charts, finite-difference connection
// and curvature, the octonionic almost complex structure, and its covariant
// derivative. Curvature leaves this module in a g-orthonormal frame.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "occert/common.hpp"
#include "occert/curvature_algebra.hpp"

namespace occert {

enum class ChartId { north, south };
const char* to_string(ChartId id);

/// Stereographic coordinates. The north chart projects from the north pole
/// e_7 (x = 0 is the south pole); the south chart projects from -e_7.
struct ChartPoint {
  ChartId chart = ChartId::north;
  Vec x = Vec::Zero(6);
};

Vec ambient_point(const ChartPoint& p);
ChartPoint to_chart(const Vec& ambient, ChartId chart);
/// The chart in which |x| <= 1.
ChartPoint chart_point_from_ambient(const Vec& ambient);
/// d(ambient)/dx, a 7 x 6 matrix.
Mat chart_jacobian(const ChartPoint& p);

struct PolynomialTerm {
  int i = 0;
  int j = 0;
  double coeff = 0.0;
  std::array<int, 6> powers{};
};

struct MetricField {
  enum class Family { round, conformal, ellipsoid, custom };

  Family family = Family::round;
  double scale = 1.0;
  Vec conformal_coeffs = Vec::Zero(7);  // f(p) = coeffs . p
  Vec semi_axes = Vec::Ones(7);
  std::vector<PolynomialTerm> custom_terms;  // chart-level g_ij(x); (i,j) also fills (j,i)

  static MetricField round(double scale = 1.0);
  static MetricField conformal_linear(const Vec& coeffs);
  static MetricField ellipsoid(const Vec& semi_axes);
  static MetricField custom(std::vector<PolynomialTerm> terms);
  static MetricField flat();

  Mat evaluate(const ChartPoint& p) const;
};

const char* to_string(MetricField::Family f);

/// Throws ErrorKind::metric unless the value is symmetric positive definite.
Mat chart_metric(const MetricField& field, const ChartPoint& p);

enum class FDScheme { central_2nd, richardson_4th };

struct FDConfig {
  double h = 1e-3;
  FDScheme scheme = FDScheme::central_2nd;

  void validate() const;
};

struct ConnectionCoefficients {
  Mat metric;
  std::vector<Mat> gamma;  // gamma[k](i, j) = Gamma^k_{ij}
  std::vector<Mat> dmetric;  // dmetric[k] = d_k g

  /// (Gamma_k)^i_j = Gamma^i_{kj}, the connection matrix along d_k.
  Mat along(int k) const;
};

ConnectionCoefficients christoffel(const MetricField& field, const ChartPoint& p, const FDConfig& fd = {});

/// max |nabla_k g_ij|, using an independent difference step for d g.
double metricity_residual(const MetricField& field, const ChartPoint& p, const FDConfig& fd = {});

/// Orthonormal-frame curvature tensor at p.
CurvatureTensor riemann(const MetricField& field, const ChartPoint& p, const FDConfig& fd = {});

/// Coordinate components R(d_i, d_j, d_k, d_l), unchecked.
CurvatureTensor riemann_coordinates(const MetricField& field, const ChartPoint& p, const FDConfig& fd = {});

/// Seven-dimensional cross product from the octonion table with e1 e2 = e3.
Vec cross7(const Vec& a, const Vec& b);
/// Structure constants c[a][b][c] with e_a x e_b = sum_c c e_c.
double g2_structure_constant(int a, int b, int c);

/// J_p(v) = p x v as a 7 x 7 matrix; preserves T_p S^6 = p^perp.
Mat g2_structure(const Vec& p);

struct ACSField {
  enum class Kind { g2_octonionic, custom };

  Kind kind = Kind::g2_octonionic;
  std::function<Mat(const ChartPoint&)> evaluator;  // custom: J in chart coordinates

  static ACSField g2() { return ACSField{}; }
  static ACSField constant(const Mat& J_chart);

  Mat chart_matrix(const ChartPoint& p) const;
};

struct NablaJResult {
  Mat frame;     // g-orthonormal frame at p, in chart coordinates
  Mat J;         // J in that frame
  NablaJ nabla;  // nabla_{E_a} J in that frame
};

NablaJResult nabla_J(const MetricField& field, const ACSField& acs, const ChartPoint& p, const FDConfig& fd = {});

struct CanonicalConnectionReport {
  double metric_residual = 0.0;            // max |Delta g|
  double complex_residual = 0.0;           // max |Delta J|
  double torsion_formula_residual = 0.0;   // antisymmetrized Delta vs 1/2((nabla_X J)JY - (nabla_Y J)JX)
  double torsion_norm = 0.0;
  double threshold = 0.0;                  // 100 h^2
  bool passed = false;
};

CanonicalConnectionReport canonical_connection_check(const MetricField& field, const ACSField& acs,
                                                     const ChartPoint& p, const FDConfig& fd = {});

/// N points uniform on S^6, each in the chart where |x| <= 1.
std::vector<ChartPoint> sample_points(int count, std::uint64_t seed);

}  // namespace occert
