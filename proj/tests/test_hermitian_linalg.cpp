#include <doctest.h>

#include <cmath>

#include "occert/hermitian_linalg.hpp"
#include "support.hpp"

using namespace occert;
using occert::test::basis;
using occert::test::max_abs;

namespace {

const EuclideanSpace kStd = EuclideanSpace::standard(6);

TwoForm omega0() {
  return fundamental_two_form(kStd, ComplexStructure{standard_complex_structure_matrix(6), true});
}

}  // namespace

TEST_SUITE("hermitian_linalg") {

TEST_CASE("standard frame gives J e1 = e2, J e2 = -e1, J e3 = e4") {
  const ComplexStructure J = make_complex_structure(Mat::Identity(6, 6));
  CHECK(max_abs(J.J * basis(6, 0) - basis(6, 1)) == 0.0);
  CHECK(max_abs(J.J * basis(6, 1) + basis(6, 0)) == 0.0);
  CHECK(max_abs(J.J * basis(6, 2) - basis(6, 3)) == 0.0);
  CHECK(max_abs(J.J * basis(6, 5) + basis(6, 4)) == 0.0);
  CHECK(J.compatible_orientation);
  CHECK(max_abs(J.J - standard_complex_structure_matrix(6)) == 0.0);
}

TEST_CASE("frames from random orthogonal matrices square to -Id and are orthogonal") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const Mat Q = random_orthogonal(rng, 6);
    const ComplexStructure J = make_complex_structure(Q);
    CHECK(max_abs(J.J * J.J + Mat::Identity(6, 6)) < 1e-12);
    CHECK(max_abs(J.J.transpose() * J.J - Mat::Identity(6, 6)) < 1e-12);
    CHECK(J.compatible_orientation == (Q.determinant() > 0));
  }
}

TEST_CASE("frames orthonormal for a non-Euclidean metric") {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const EuclideanSpace space = EuclideanSpace::with_metric(occert::test::random_spd(rng, 6));
    const Mat F = space.orthonormal_frame() * random_orthogonal(rng, 6);
    const ComplexStructure J = make_complex_structure(F, space);
    CHECK(max_abs(J.J * J.J + Mat::Identity(6, 6)) < 1e-12);
    CHECK(max_abs(J.J.transpose() * space.g * J.J - space.g) < 1e-12);
    // J F = F J0 column by column.
    CHECK(max_abs(J.J * F - F * standard_complex_structure_matrix(6)) < 1e-12);
  }
}

TEST_CASE("swapping e1 and e2 conjugates J by the swap and flips orientation") {
  Mat P = Mat::Identity(6, 6);
  P.col(0).swap(P.col(1));
  const ComplexStructure J = make_complex_structure(Mat::Identity(6, 6));
  const ComplexStructure Js = make_complex_structure(P);
  CHECK(max_abs(Js.J - P * J.J * P.transpose()) == 0.0);
  CHECK(max_abs(Js.J.transpose() * Js.J - Mat::Identity(6, 6)) == 0.0);
  CHECK(J.compatible_orientation);
  CHECK_FALSE(Js.compatible_orientation);
  CHECK_FALSE(orientation_compatible(kStd, Js.J));
}

TEST_CASE("non-orthonormal frames are rejected") {
  Mat F = Mat::Identity(6, 6);
  F(0, 1) = 1e-6;
  try {
    make_complex_structure(F);
    FAIL("expected a frame error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::frame);
  }
  // Within tolerance is accepted.
  F(0, 1) = 1e-11;
  CHECK_NOTHROW(make_complex_structure(F));
}

TEST_CASE("fundamental two-form of J0 is e12 + e34 + e56") {
  const TwoForm w = omega0();
  Mat expected = Mat::Zero(6, 6);
  for (int k = 0; k < 3; ++k) {
    expected(2 * k, 2 * k + 1) = 1.0;
    expected(2 * k + 1, 2 * k) = -1.0;
  }
  CHECK(max_abs(w.coeffs - expected) == 0.0);
}

TEST_CASE("omega(X, JX) = |X|^2 and omega is J-invariant") {
  Rng rng(13);
  for (int t = 0; t < 1000; ++t) {
    const ComplexStructure J = random_orthogonal_complex_structure(rng, Orientation::positive);
    const TwoForm w = fundamental_two_form(kStd, J);
    const Vec X = rng.normal_vector(6), Y = rng.normal_vector(6);
    CHECK(std::abs(w(X, J.J * X) - X.squaredNorm()) < 1e-12 * (1 + X.squaredNorm()));
    CHECK(std::abs(w(J.J * X, J.J * Y) - w(X, Y)) < 1e-12 * (1 + X.norm() * Y.norm()));
    CHECK(max_abs(w.coeffs + w.coeffs.transpose()) == 0.0);
  }
}

TEST_CASE("fundamental two-form rejects J that is not g-orthogonal") {
  Mat J = standard_complex_structure_matrix(6);
  Mat S = Mat::Identity(6, 6);
  S(0, 0) = 2.0;
  J = S * J * S.inverse();  // still J^2 = -Id, no longer orthogonal
  try {
    fundamental_two_form(kStd, ComplexStructure{J, true});
    FAIL("expected a compatibility error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::compatibility);
  }
}

TEST_CASE("hat of J0 is -omega0, hat of zero is zero") {
  const TwoForm h = hat(kStd, SkewEndomorphism{standard_complex_structure_matrix(6)});
  CHECK(max_abs(h.coeffs + omega0().coeffs) < 1e-15);
  CHECK(max_abs(hat(kStd, SkewEndomorphism{Mat::Zero(6, 6)}).coeffs) == 0.0);
}

TEST_CASE("hat and sharp are inverse, also for a general metric") {
  Rng rng(14);
  for (int t = 0; t < 200; ++t) {
    const EuclideanSpace space = t % 2 ? kStd : EuclideanSpace::with_metric(occert::test::random_spd(rng, 6));
    // A = g^-1 S is g-skew for skew S.
    const SkewEndomorphism A{space.g.inverse() * random_skew(rng, 6)};
    const TwoForm a = hat(space, A);
    CHECK(max_abs(hat(space, sharp(space, a)).coeffs - a.coeffs) < 1e-12);
    CHECK(max_abs(sharp(space, a).A - A.A) < 1e-10);
    // hat(A)(v, w) = g(v, A w)
    const Vec v = rng.normal_vector(6), w = rng.normal_vector(6);
    CHECK(std::abs(a(v, w) - v.dot(space.g * A.A * w)) < 1e-12 * (1 + v.norm() * w.norm() * A.A.norm()));
  }
}

TEST_CASE("hat rejects endomorphisms that are not skew") {
  Mat A = standard_complex_structure_matrix(6);
  A(0, 0) = 1e-6;
  try {
    hat(kStd, SkewEndomorphism{A});
    FAIL("expected a skewness error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::skewness);
  }
}

TEST_CASE("pairing identity (A* alpha, beta) = (hat A, alpha ^ beta)") {
  Rng rng(15);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const SkewEndomorphism A{random_skew(rng, 6)};
    const Vec alpha = rng.normal_vector(6), beta = rng.normal_vector(6);
    const double lhs = inner_covectors(kStd, pullback(A.A, alpha), beta);
    const double rhs = inner_lambda2(kStd, hat(kStd, A), wedge(alpha, beta));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("wedge follows alpha(X)beta(Y) - alpha(Y)beta(X)") {
  const TwoForm w = wedge(basis(6, 0), basis(6, 1));
  CHECK(w(basis(6, 0), basis(6, 1)) == 1.0);
  CHECK(w(basis(6, 1), basis(6, 0)) == -1.0);
  CHECK(norm_lambda2(kStd, w) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("positivity classification") {
  const ComplexStructure J0{standard_complex_structure_matrix(6), true};
  const TwoForm w = omega0();
  CHECK(is_positive_form(w, J0) == FormClass::positive);
  const FormClass neg = is_positive_form(TwoForm(-w.coeffs), J0);
  CHECK(neg != FormClass::positive);
  CHECK(neg != FormClass::nonnegative);
  CHECK(is_positive_form(wedge(basis(6, 0), basis(6, 2)), J0) == FormClass::not_11);
  // e12 alone is (1,1) and degenerate but nonnegative.
  CHECK(is_positive_form(wedge(basis(6, 0), basis(6, 1)), J0) == FormClass::nonnegative);
  CHECK(is_positive_form(TwoForm::zero(6), J0) == FormClass::nonnegative);
}

TEST_CASE("projection scalar of J0 is 3i on both paths") {
  const ComplexStructure J0{standard_complex_structure_matrix(6), true};
  const SkewEndomorphism A{standard_complex_structure_matrix(6)};
  const Complex lemma = canonical_projection_scalar(kStd, A, J0);
  const Complex coframe = canonical_projection_scalar_coframe(kStd, A, J0);
  CHECK(std::abs(lemma - Complex(0.0, 3.0)) < 1e-12);
  CHECK(std::abs(coframe - Complex(0.0, 3.0)) < 1e-10);
}

TEST_CASE("projection scalar vanishes when hat A is orthogonal to omega") {
  const ComplexStructure J0{standard_complex_structure_matrix(6), true};
  const SkewEndomorphism A = sharp(kStd, wedge(basis(6, 0), basis(6, 2)));
  CHECK(std::abs(canonical_projection_scalar(kStd, A, J0)) < 1e-15);
  CHECK(std::abs(canonical_projection_scalar_coframe(kStd, A, J0)) < 1e-12);
}

TEST_CASE("projection scalar: lemma path agrees with the explicit coframe path") {
  Rng rng(16);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Orientation o = t % 2 ? Orientation::positive : Orientation::negative;
    const ComplexStructure J = random_orthogonal_complex_structure(rng, o);
    const SkewEndomorphism A{random_skew(rng, 6)};
    const Complex a = canonical_projection_scalar(kStd, A, J);
    const Complex b = canonical_projection_scalar_coframe(kStd, A, J);
    worst = std::max(worst, std::abs(a - b));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("projection scalar rejects a degenerate J") {
  Mat J = standard_complex_structure_matrix(6);
  J(0, 1) = -0.5;
  Rng rng(1);
  try {
    canonical_projection_scalar(kStd, SkewEndomorphism{random_skew(rng, 6)}, ComplexStructure{J, true});
    FAIL("expected a structure error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::structure);
  }
}

TEST_CASE("Phi* ^ Phi term: zero, rank one, and random type (1,0) inputs") {
  const ComplexStructure J0{standard_complex_structure_matrix(6), true};
  CVec w(2);
  w << 1.0, 0.0;

  HomValuedOneForm zero;
  zero.components.assign(6, CMat::Zero(2, 2));
  CHECK(max_abs(phi_wedge_negativity(zero, J0, w).coeffs) == 0.0);

  // theta = e^1 + i e^2 satisfies theta(J0 X) = i theta(X).
  CMat L(2, 2);
  L << Complex(1.0, 0.5), 0.0, Complex(0.0, -2.0), 1.0;
  HomValuedOneForm rank_one;
  rank_one.components.assign(6, CMat::Zero(2, 2));
  rank_one.components[0] = L;
  rank_one.components[1] = Complex(0.0, 1.0) * L;
  const TwoForm z = phi_wedge_negativity(rank_one, J0, w);
  CHECK(is_positive_form(z, J0) == FormClass::nonnegative);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (associated_bilinear(z, J0.J) + associated_bilinear(z, J0.J).transpose()));
  int positive = 0;
  for (int i = 0; i < 6; ++i) positive += es.eigenvalues()(i) > 1e-12;
  CHECK(positive == 2);  // one complex direction, the line spanned by e1, e2

  // The conjugate covector has type (0,1) and is refused.
  HomValuedOneForm wrong = rank_one;
  wrong.components[1] = Complex(0.0, -1.0) * L;
  try {
    phi_wedge_negativity(wrong, J0, w);
    FAIL("expected a type error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::type);
  }

  Rng rng(17);
  int indefinite = 0;
  for (int t = 0; t < 1000; ++t) {
    const ComplexStructure J = random_orthogonal_complex_structure(rng, Orientation::positive);
    const HomValuedOneForm phi = random_type10_one_form(rng, J.J, 2, 3);
    CVec u(2);
    u << Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal());
    u.normalize();
    const FormClass c = is_positive_form(phi_wedge_negativity(phi, J, u), J);
    indefinite += c == FormClass::indefinite || c == FormClass::not_11;
  }
  CHECK(indefinite == 0);
}

TEST_CASE("norms: |omega| = sqrt 3, |e12| = 1, and |z|_E^2 = 2 |z|^2") {
  CHECK(norm_lambda2(kStd, omega0()) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  const TwoForm e12 = wedge(basis(6, 0), basis(6, 1));
  CHECK(norm_lambda2(kStd, e12) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(norm_E(kStd, e12) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  Rng rng(18);
  for (int t = 0; t < 1000; ++t) {
    const TwoForm z(random_skew(rng, 6));
    const double a = norm_E(kStd, z), b = norm_lambda2(kStd, z);
    CHECK(std::abs(a * a - 2.0 * b * b) <= 1e-14 * a * a);
  }
}

TEST_CASE("random complex structures: invariants, orientation and determinism") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    for (Orientation o : {Orientation::positive, Orientation::negative}) {
      const ComplexStructure J = random_orthogonal_complex_structure(s, o);
      CHECK(max_abs(J.J * J.J + Mat::Identity(6, 6)) < 1e-12);
      CHECK(max_abs(J.J.transpose() * J.J - Mat::Identity(6, 6)) < 1e-12);
      CHECK(orientation_compatible(kStd, J.J) == (o == Orientation::positive));
      CHECK(J.compatible_orientation == (o == Orientation::positive));
    }
  }
  const ComplexStructure a = random_orthogonal_complex_structure(42, Orientation::positive);
  const ComplexStructure b = random_orthogonal_complex_structure(42, Orientation::positive);
  CHECK(max_abs(a.J - b.J) == 0.0);
}

TEST_CASE("random complex structures: omega components average to zero") {
  const int N = 10000;
  Rng rng(19);
  Mat sum = Mat::Zero(6, 6), sum_sq = Mat::Zero(6, 6);
  for (int t = 0; t < N; ++t) {
    const Mat w = fundamental_two_form(kStd, random_orthogonal_complex_structure(rng, Orientation::positive)).coeffs;
    sum += w;
    sum_sq += w.cwiseProduct(w);
  }
  const Mat mean = sum / N;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      const double sigma = std::sqrt(sum_sq(i, j) / N - mean(i, j) * mean(i, j));
      CHECK(std::abs(mean(i, j)) < 3.0 * sigma / std::sqrt(double(N)));
    }
}

TEST_CASE("Euclidean space validation") {
  CHECK_THROWS_AS(EuclideanSpace::standard(5).validate(), Error);
  Mat g = Mat::Identity(6, 6);
  g(0, 0) = -1.0;
  CHECK_THROWS_AS(EuclideanSpace::with_metric(g).validate(), Error);
}

}  // TEST_SUITE
