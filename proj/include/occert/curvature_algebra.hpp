#pragma once

// Algebraic curvature tensors on a Euclidean space given in an orthonormal
// basis (g = Id), and the pointwise quantities built from them.
//
// Sign convention: R(X,Y,Z,T) is oriented so that the unit round sphere has
// R = g⊼g with (g⊼g)(X,Y,Z,T) = g(X,Z)g(Y,T) - g(X,T)g(Y,Z); equivalently
// R(X,Y,Z,T) = g(R(X,Y)T, Z) for R(X,Y) = [D_X, D_Y] - D_[X,Y].

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "occert/common.hpp"
#include "occert/hermitian_linalg.hpp"

namespace occert {

class CurvatureTensor {
 public:
  CurvatureTensor() = default;
  explicit CurvatureTensor(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  int dim() const { return dim_; }

  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  double evaluate(const Vec& x, const Vec& y, const Vec& z, const Vec& t) const;
  /// Components R(E_a, E_b, E_c, E_d) for the columns E_a of a frame.
  CurvatureTensor in_frame(const Mat& frame) const;
  double frobenius_norm() const;
  double max_abs_component() const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  CurvatureTensor& operator+=(const CurvatureTensor& other);
  CurvatureTensor& operator-=(const CurvatureTensor& other);
  CurvatureTensor& operator*=(double s);
  friend CurvatureTensor operator+(CurvatureTensor a, const CurvatureTensor& b) { return a += b; }
  friend CurvatureTensor operator-(CurvatureTensor a, const CurvatureTensor& b) { return a -= b; }
  friend CurvatureTensor operator*(double s, CurvatureTensor a) { return a *= s; }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * dim_ + j) * dim_ + k) * dim_ + l;
  }

  int dim_ = 0;
  std::vector<double> data_;
};

/// k (g⊼g) for an arbitrary symmetric bilinear form g.
CurvatureTensor kulkarni_nomizu_square(const Mat& g, double k = 1.0);

struct SymmetryReport {
  double antisym_first = 0.0;   // R_ijkl + R_jikl
  double antisym_second = 0.0;  // R_ijkl + R_ijlk
  double pair_exchange = 0.0;   // R_ijkl - R_klij
  double bianchi = 0.0;         // R_ijkl + R_jkil + R_kijl

  double max() const;
};

SymmetryReport validate_symmetries(const CurvatureTensor& R);

/// Ordered basis {e^i ^ e^j}_{i<j} of Lambda^2.
std::vector<std::pair<int, int>> lambda2_basis(int dim);

struct CurvatureOperator {
  Mat matrix;                   // in the basis lambda2_basis(dim)
  std::vector<double> spectrum;  // ascending

  double lambda_min() const { return spectrum.front(); }
  double lambda_max() const { return spectrum.back(); }
};

CurvatureOperator curvature_operator(const CurvatureTensor& R, double symmetry_tolerance = 1e-6);

/// Image of a 2-form under the curvature operator.
TwoForm apply_curvature_operator(const CurvatureTensor& R, const TwoForm& beta);

/// Ric(X,Y) = sum_i R(X,e_i,Y,e_i).
Mat ricci(const CurvatureTensor& R);
/// Ric*(X,Y) = sum_i R(X,e_i,JY,Je_i).
Mat ricci_star(const CurvatureTensor& R, const Mat& J);
/// 1/2 sum_i R(X,JY,e_i,Je_i); equals ricci_star on algebraic curvature tensors.
Mat ricci_star_contracted(const CurvatureTensor& R, const Mat& J);

struct StarRicciData {
  Mat ric;
  Mat ric_star;
  TwoForm psi;
  TwoForm phi;
};

/// psi(X,Y) = sum_i R(X,Y,e_i,Je_i), cross-checked against -2 Ric*(X,JY).
TwoForm psi(const CurvatureTensor& R, const Mat& J, double tol = 1e-9);

/// Covariant derivative of J at a point: d[k] = nabla_{e_k} J.
struct NablaJ {
  std::vector<Mat> d;

  int dim() const { return static_cast<int>(d.size()); }
  Mat along(const Vec& x) const;
  static NablaJ zero(int dim) { return NablaJ{std::vector<Mat>(dim, Mat::Zero(dim, dim))}; }
};

/// Throws ErrorKind::input unless every nabla_X J is skew and anticommutes with J.
void validate_nabla_j(const Mat& J, const NablaJ& nabla, double tol = 1e-6);

/// phi(X,Y) = tr((nabla_X J)(nabla_{JY} J)); phi(X,JX) = |nabla_X J|^2.
TwoForm phi(const Mat& J, const NablaJ& nabla, double tol = 1e-6);

/// Pointwise first Chern form gamma_1 = (2 psi + phi) / (8 pi).
TwoForm chern_form(const CurvatureTensor& R, const Mat& J, const NablaJ& nabla, double tol = 1e-6);

StarRicciData star_ricci_data(const CurvatureTensor& R, const Mat& J, const NablaJ& nabla, double tol = 1e-6);

struct FrameMatrix {
  Mat frame;
  Mat alpha;  // alpha_ij = sum_k R(e_i, e_k, e_{j#}, e_{k#})
  Mat a;      // (alpha + alpha^T) / 2
  Mat M;      // sym Ric*(e_i, e_j) for J built from the frame
};

FrameMatrix star_matrix(const CurvatureTensor& R, const Mat& frame, double frame_tolerance = 1e-9);

struct SupNormOptions {
  int multistarts = 64;
  int iterations = 200;
  double gradient_tolerance = 1e-10;
  std::uint64_t seed = 0x5eed;
};

struct SupNormBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::array<Vec, 4> argmax;
};

/// lower <= max_{|v_i|=1} |R(v1,v2,v3,v4)| <= upper = |R|_F.
SupNormBounds sup_norm_bounds(const CurvatureTensor& R, const SupNormOptions& options = {});

/// Gaussian tensor projected onto the algebraic curvature tensors.
CurvatureTensor random_curvature_tensor(Rng& rng, int dim);

enum class NablaJKind { hermitian, nearly_kahler };

/// Random nabla J with nabla_{JX} J = +J nabla_X J (hermitian), or a nearly
/// Kähler one, (nabla_X J)X = 0, from the real part of a random multiple of a
/// (3,0)-form (dimension 6 only). J must be orthogonal.
NablaJ random_nabla_j(Rng& rng, const Mat& J, NablaJKind kind);

}  // namespace occert
