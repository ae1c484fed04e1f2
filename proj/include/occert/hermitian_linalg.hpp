#pragma once

// Linear algebra of an even-dimensional Euclidean space carrying orthogonal
// complex structures: 2-forms, type (1,1) positivity, index operators and the
// pointwise identities relating skew endomorphisms to the canonical line.
//
// Conventions used throughout:
//   * matrices act on column vectors; a complex structure J has Je_j as its
//     j-th column, and a 2-form is stored by its coefficients zeta(e_i, e_j);
//   * {e^i ^ e^j}_{i<j} is orthonormal in Lambda^2 for a g-orthonormal basis,
//     so (zeta, eta) = 1/2 tr(g^-1 zeta g^-1 eta^T);
//   * (alpha ^ beta)(X, Y) = alpha(X) beta(Y) - alpha(Y) beta(X);
//   * a complex covector theta is of type (1,0) when theta(JX) = i theta(X).

#include <cstdint>
#include <vector>

#include "occert/common.hpp"

namespace occert {

struct EuclideanSpace {
  int dim = 6;
  Mat g = Mat::Identity(6, 6);
  int orientation = +1;  // sign of the reference volume form

  static EuclideanSpace standard(int dim = 6);
  static EuclideanSpace with_metric(const Mat& g, int orientation = +1);

  int complex_dim() const { return dim / 2; }
  void validate() const;
  /// Columns form a g-orthonormal basis (Gram-Schmidt of the working basis).
  Mat orthonormal_frame() const;
};

struct ComplexStructure {
  Mat J;
  bool compatible_orientation = true;

  int dim() const { return static_cast<int>(J.rows()); }
};

struct TwoForm {
  Mat coeffs;

  TwoForm() = default;
  explicit TwoForm(Mat c) : coeffs(std::move(c)) {}
  static TwoForm zero(int dim) { return TwoForm(Mat::Zero(dim, dim)); }

  int dim() const { return static_cast<int>(coeffs.rows()); }
  double operator()(const Vec& x, const Vec& y) const { return x.dot(coeffs * y); }
};

struct SkewEndomorphism {
  Mat A;
};

/// Phi(e_k) for each working-basis vector e_k, as maps W0 -> W1.
struct HomValuedOneForm {
  std::vector<CMat> components;

  CMat at(const Vec& x) const;
  int source_dim() const { return components.empty() ? 0 : static_cast<int>(components.front().cols()); }
};

enum class FormClass { positive, nonnegative, indefinite, not_11 };
const char* to_string(FormClass c);

enum class Orientation { positive, negative };

/// J0 e_{2k-1} = e_{2k}, J0 e_{2k} = -e_{2k-1}.
Mat standard_complex_structure_matrix(int dim);

/// Je_i = (-1)^{i-1} e_{i#} with i# = i - (-1)^i, frame given by columns.
ComplexStructure make_complex_structure(const Mat& frame,
                                        const EuclideanSpace& space = EuclideanSpace::standard(),
                                        double frame_tolerance = 1e-9);

/// Throws ErrorKind::structure unless J^2 = -Id and J is g-orthogonal.
void validate_complex_structure(const EuclideanSpace& space, const Mat& J, double tol = 1e-12);

bool orientation_compatible(const EuclideanSpace& space, const Mat& J);

double pfaffian(const Mat& skew);

TwoForm fundamental_two_form(const EuclideanSpace& space, const ComplexStructure& J,
                             const Tolerances& tol = {});

TwoForm hat(const EuclideanSpace& space, const SkewEndomorphism& A, const Tolerances& tol = {});
SkewEndomorphism sharp(const EuclideanSpace& space, const TwoForm& zeta);

TwoForm wedge(const Vec& alpha, const Vec& beta);
/// Pull-back of a covector: (A* alpha)(v) = alpha(Av).
Vec pullback(const Mat& A, const Vec& alpha);
double inner_covectors(const EuclideanSpace& space, const Vec& alpha, const Vec& beta);
double inner_lambda2(const EuclideanSpace& space, const TwoForm& a, const TwoForm& b);

double norm_lambda2(const EuclideanSpace& space, const TwoForm& zeta);
double norm_E(const EuclideanSpace& space, const TwoForm& zeta);

bool is_type_11(const TwoForm& zeta, const Mat& J, double tol = 1e-9);
/// zeta(JX, JY) averaged with zeta(X, Y).
TwoForm project_11(const TwoForm& zeta, const Mat& J);
/// b(X, Y) = zeta(X, JY).
Mat associated_bilinear(const TwoForm& zeta, const Mat& J);
FormClass is_positive_form(const TwoForm& zeta, const ComplexStructure& J, double tol = 1e-9);

/// -i (A^, omega), the scalar by which a skew endomorphism acts on the
/// canonical line Lambda^{n,0}.
Complex canonical_projection_scalar(const EuclideanSpace& space, const SkewEndomorphism& A,
                                    const ComplexStructure& J, const Tolerances& tol = {});

/// Same quantity computed independently: builds a unitary (1,0)-coframe,
/// the volume element Omega in Lambda^n(V* x C), applies the derivation
/// induced by A* and returns <A* Omega, Omega> / <Omega, Omega>.
Complex canonical_projection_scalar_coframe(const EuclideanSpace& space, const SkewEndomorphism& A,
                                            const ComplexStructure& J, const Tolerances& tol = {});

/// Orthonormal frame (f_1, J f_1, ..., f_n, J f_n) for an orthogonal J, in
/// g-orthonormal coordinates.
Mat adapted_frame(const Mat& J_orthonormal);

/// Unitary (1,0)-coframe for J in g-orthonormal coordinates: row a is theta^a.
CMat unitary_coframe(const Mat& J_orthonormal);

void validate_type_10(const HomValuedOneForm& phi, const Mat& J, double tol = 1e-9);

/// Scalar 2-form <(-i Phi* ^ Phi) w, w>.
TwoForm phi_wedge_negativity(const HomValuedOneForm& phi, const ComplexStructure& J, const CVec& w,
                             double tol = 1e-9);

ComplexStructure random_orthogonal_complex_structure(std::uint64_t seed, Orientation orientation,
                                                     const EuclideanSpace& space = EuclideanSpace::standard());
ComplexStructure random_orthogonal_complex_structure(Rng& rng, Orientation orientation,
                                                     const EuclideanSpace& space = EuclideanSpace::standard());

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Mat random_orthogonal(Rng& rng, int dim);

Mat random_skew(Rng& rng, int dim);

/// Phi(X) = sum_a theta^a(X) L_a with random complex L_a, hence of type (1,0).
HomValuedOneForm random_type10_one_form(Rng& rng, const Mat& J, int source_dim, int target_dim);

}  // namespace occert
