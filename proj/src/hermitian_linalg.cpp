#include "occert/hermitian_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace occert {

namespace {

double scale_of(const Mat& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_square(const Mat& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim)
    throw Error(ErrorKind::input, std::string(what) + " has wrong shape");
}

// All size-k subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

// Coefficients of theta^1 ^ ... ^ theta^k on the basis e^I, I increasing.
CVec wedge_product(const std::vector<CVec>& factors, const std::vector<std::vector<int>>& basis) {
  const int k = static_cast<int>(factors.size());
  CVec out(static_cast<Eigen::Index>(basis.size()));
  CMat minor(k, k);
  for (std::size_t b = 0; b < basis.size(); ++b) {
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) minor(r, c) = factors[r](basis[b][c]);
    out(static_cast<Eigen::Index>(b)) = minor.determinant();
  }
  return out;
}

}  // namespace

const char* to_string(FormClass c) {
  switch (c) {
    case FormClass::positive: return "positive";
    case FormClass::nonnegative: return "nonnegative";
    case FormClass::indefinite: return "indefinite";
    case FormClass::not_11: return "not_11";
  }
  return "unknown";
}

EuclideanSpace EuclideanSpace::standard(int dim) {
  EuclideanSpace s;
  s.dim = dim;
  s.g = Mat::Identity(dim, dim);
  s.validate();
  return s;
}

EuclideanSpace EuclideanSpace::with_metric(const Mat& g, int orientation) {
  EuclideanSpace s;
  s.dim = static_cast<int>(g.rows());
  s.g = g;
  s.orientation = orientation >= 0 ? +1 : -1;
  s.validate();
  return s;
}

void EuclideanSpace::validate() const {
  if (dim <= 0 || dim % 2 != 0) throw Error(ErrorKind::input, "dimension must be even and positive");
  require_square(g, dim, "metric");
  if (max_abs(g - g.transpose()) > 1e-12 * scale_of(g)) throw Error(ErrorKind::metric, "metric is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error(ErrorKind::metric, "metric is not positive definite");
}

Mat EuclideanSpace::orthonormal_frame() const {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::metric, "metric is not positive definite");
  // g = L L^T, so E = L^{-T} satisfies E^T g E = I and is upper triangular.
  Mat L = llt.matrixL();
  return L.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(dim, dim));
}

CMat HomValuedOneForm::at(const Vec& x) const {
  CMat out = CMat::Zero(components.front().rows(), components.front().cols());
  for (std::size_t k = 0; k < components.size(); ++k) out += x(static_cast<Eigen::Index>(k)) * components[k];
  return out;
}

Mat standard_complex_structure_matrix(int dim) {
  Mat J = Mat::Zero(dim, dim);
  for (int k = 0; k + 1 < dim; k += 2) {
    J(k + 1, k) = 1.0;
    J(k, k + 1) = -1.0;
  }
  return J;
}

double pfaffian(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1.0;
  if (n % 2 != 0) return 0.0;
  double sum = 0.0;
  for (int j = 1; j < n; ++j) {
    if (a(0, j) == 0.0) continue;
    std::vector<int> keep;
    for (int r = 1; r < n; ++r)
      if (r != j) keep.push_back(r);
    Mat minor(n - 2, n - 2);
    for (int r = 0; r < n - 2; ++r)
      for (int c = 0; c < n - 2; ++c) minor(r, c) = a(keep[r], keep[c]);
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    sum += sign * a(0, j) * pfaffian(minor);
  }
  return sum;
}

void validate_complex_structure(const EuclideanSpace& space, const Mat& J, double tol) {
  require_square(J, space.dim, "complex structure");
  const Mat id = Mat::Identity(space.dim, space.dim);
  if (max_abs(J * J + id) > tol * scale_of(J * J))
    throw Error(ErrorKind::structure, "J^2 differs from -Id");
  if (max_abs(J.transpose() * space.g * J - space.g) > tol * scale_of(space.g))
    throw Error(ErrorKind::structure, "J is not orthogonal for g");
}

bool orientation_compatible(const EuclideanSpace& space, const Mat& J) {
  const Mat E = space.orthonormal_frame();
  const Mat omega = E.transpose() * J.transpose() * space.g * E;
  return pfaffian(0.5 * (omega - omega.transpose())) * space.orientation > 0.0;
}

ComplexStructure make_complex_structure(const Mat& frame, const EuclideanSpace& space, double frame_tolerance) {
  require_square(frame, space.dim, "frame");
  const Mat gram = frame.transpose() * space.g * frame;
  const double deviation = max_abs(gram - Mat::Identity(space.dim, space.dim));
  if (!(deviation <= frame_tolerance))
    throw Error(ErrorKind::frame, "frame is not orthonormal (Gram deviation " + std::to_string(deviation) + ")");
  // frame^-1 = frame^T g for an orthonormal frame.
  ComplexStructure out;
  out.J = frame * standard_complex_structure_matrix(space.dim) * frame.transpose() * space.g;
  out.compatible_orientation = frame.determinant() * space.orientation > 0.0;
  return out;
}

TwoForm fundamental_two_form(const EuclideanSpace& space, const ComplexStructure& J, const Tolerances& tol) {
  require_square(J.J, space.dim, "complex structure");
  if (max_abs(J.J.transpose() * space.g * J.J - space.g) > tol.construction * 10.0 * scale_of(space.g))
    throw Error(ErrorKind::compatibility, "J is not orthogonal for g");
  const Mat w = J.J.transpose() * space.g;
  return TwoForm(0.5 * (w - w.transpose()));
}

TwoForm hat(const EuclideanSpace& space, const SkewEndomorphism& A, const Tolerances& tol) {
  require_square(A.A, space.dim, "endomorphism");
  const Mat lowered = space.g * A.A;
  if (max_abs(lowered + lowered.transpose()) > tol.construction * 10.0 * scale_of(lowered))
    throw Error(ErrorKind::skewness, "endomorphism is not skew for g");
  return TwoForm(0.5 * (lowered - lowered.transpose()));
}

SkewEndomorphism sharp(const EuclideanSpace& space, const TwoForm& zeta) {
  require_square(zeta.coeffs, space.dim, "2-form");
  return SkewEndomorphism{space.g.ldlt().solve(zeta.coeffs)};
}

TwoForm wedge(const Vec& alpha, const Vec& beta) {
  return TwoForm(alpha * beta.transpose() - beta * alpha.transpose());
}

Vec pullback(const Mat& A, const Vec& alpha) { return A.transpose() * alpha; }

double inner_covectors(const EuclideanSpace& space, const Vec& alpha, const Vec& beta) {
  return alpha.dot(space.g.ldlt().solve(beta));
}

double inner_lambda2(const EuclideanSpace& space, const TwoForm& a, const TwoForm& b) {
  const auto ginv = space.g.ldlt();
  const Mat left = ginv.solve(a.coeffs);
  const Mat right = ginv.solve(b.coeffs.transpose());
  return 0.5 * (left * right).trace();
}

double norm_lambda2(const EuclideanSpace& space, const TwoForm& zeta) {
  return std::sqrt(std::max(0.0, inner_lambda2(space, zeta, zeta)));
}

double norm_E(const EuclideanSpace& space, const TwoForm& zeta) {
  const auto ginv = space.g.ldlt();
  const Mat a = ginv.solve(zeta.coeffs);
  const Mat b = ginv.solve(zeta.coeffs.transpose());
  return std::sqrt(std::max(0.0, (a * b).trace()));
}

bool is_type_11(const TwoForm& zeta, const Mat& J, double tol) {
  return max_abs(J.transpose() * zeta.coeffs * J - zeta.coeffs) <= tol * scale_of(zeta.coeffs);
}

TwoForm project_11(const TwoForm& zeta, const Mat& J) {
  return TwoForm(0.5 * (zeta.coeffs + J.transpose() * zeta.coeffs * J));
}

Mat associated_bilinear(const TwoForm& zeta, const Mat& J) { return zeta.coeffs * J; }

FormClass is_positive_form(const TwoForm& zeta, const ComplexStructure& J, double tol) {
  if (!is_type_11(zeta, J.J, tol)) return FormClass::not_11;
  const Mat b = associated_bilinear(zeta, J.J);
  const Mat sym = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() > tol * scale) return FormClass::positive;
  if (ev.minCoeff() >= -tol * scale) return FormClass::nonnegative;
  return FormClass::indefinite;
}

Complex canonical_projection_scalar(const EuclideanSpace& space, const SkewEndomorphism& A,
                                    const ComplexStructure& J, const Tolerances& tol) {
  validate_complex_structure(space, J.J, tol.construction * 1e3);
  const TwoForm omega = fundamental_two_form(space, J, tol);
  const double pairing = inner_lambda2(space, hat(space, A, tol), omega);
  return Complex(0.0, -pairing);
}

Mat adapted_frame(const Mat& J) {
  const int dim = static_cast<int>(J.rows());
  std::vector<Vec> frame;
  for (int candidate = 0; candidate < dim && static_cast<int>(frame.size()) < dim; ++candidate) {
    Vec v = Vec::Unit(dim, candidate);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& f : frame) v -= f.dot(v) * f;
    if (v.norm() < 1e-6) continue;
    v.normalize();
    Vec jv = J * v;
    for (const Vec& f : frame) jv -= f.dot(jv) * f;
    jv -= v.dot(jv) * v;
    jv.normalize();
    frame.push_back(v);
    frame.push_back(jv);
  }
  if (static_cast<int>(frame.size()) != dim) throw Error(ErrorKind::structure, "could not build a J-adapted frame");
  Mat F(dim, dim);
  for (int i = 0; i < dim; ++i) F.col(i) = frame[i];
  return F;
}

CMat unitary_coframe(const Mat& J) {
  const Mat F = adapted_frame(J);
  const int dim = static_cast<int>(J.rows());
  const int n = dim / 2;
  CMat theta(n, dim);
  const double s = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < dim; ++i) theta(a, i) = s * Complex(F(i, 2 * a), F(i, 2 * a + 1));
  return theta;
}

Complex canonical_projection_scalar_coframe(const EuclideanSpace& space, const SkewEndomorphism& A,
                                            const ComplexStructure& J, const Tolerances& tol) {
  validate_complex_structure(space, J.J, tol.construction * 1e3);
  hat(space, A, tol);  // skewness check
  const Mat E = space.orthonormal_frame();
  const Mat Einv = E.transpose() * space.g;
  const Mat Jo = Einv * J.J * E;
  const Mat Ao = Einv * A.A * E;
  const CMat theta = unitary_coframe(Jo);
  const int n = space.complex_dim();
  const auto basis = subsets(space.dim, n);

  std::vector<CVec> factors(n);
  for (int a = 0; a < n; ++a) factors[a] = theta.row(a).transpose();
  const CVec omega = wedge_product(factors, basis);

  // A* acts on Lambda^n as a derivation: replace one factor at a time.
  const CMat pull = Ao.transpose().cast<Complex>();
  CVec pulled = CVec::Zero(omega.size());
  for (int a = 0; a < n; ++a) {
    std::vector<CVec> f = factors;
    f[a] = pull * factors[a];
    pulled += wedge_product(f, basis);
  }
  // <xi, eta> = sum xi_I conj(eta_I)
  const Complex num = omega.dot(pulled);  // Eigen's dot conjugates the left argument
  const Complex den = omega.dot(omega);
  return num / den;
}

void validate_type_10(const HomValuedOneForm& phi, const Mat& J, double tol) {
  const int dim = static_cast<int>(J.rows());
  if (static_cast<int>(phi.components.size()) != dim)
    throw Error(ErrorKind::input, "one-form must have one component per basis vector");
  double scale = 1.0;
  for (const auto& c : phi.components) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  for (int j = 0; j < dim; ++j) {
    const CMat lhs = phi.at(J.col(j));
    const CMat rhs = Complex(0.0, 1.0) * phi.components[j];
    if ((lhs - rhs).cwiseAbs().maxCoeff() > tol * scale)
      throw Error(ErrorKind::type, "one-form is not of type (1,0): Phi(JX) != i Phi(X)");
  }
}

TwoForm phi_wedge_negativity(const HomValuedOneForm& phi, const ComplexStructure& J, const CVec& w, double tol) {
  validate_type_10(phi, J.J, tol);
  const int dim = J.dim();
  if (phi.source_dim() != w.size()) throw Error(ErrorKind::input, "vector w does not live in the source space");
  CMat u(phi.components.front().rows(), dim);
  for (int k = 0; k < dim; ++k) u.col(k) = phi.components[k] * w;
  // <(Phi(X)* Phi(Y) - Phi(Y)* Phi(X)) w, w> = 2i Im(u(X)^H u(Y)), times -i.
  const CMat gram = u.adjoint() * u;
  return TwoForm(2.0 * gram.imag());
}

Mat random_orthogonal(Rng& rng, int dim) {
  const Mat gauss = rng.normal_matrix(dim, dim);
  Eigen::HouseholderQR<Mat> qr(gauss);
  Mat q = qr.householderQ() * Mat::Identity(dim, dim);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Mat random_skew(Rng& rng, int dim) {
  const Mat m = rng.normal_matrix(dim, dim);
  return 0.5 * (m - m.transpose());
}

ComplexStructure random_orthogonal_complex_structure(Rng& rng, Orientation orientation, const EuclideanSpace& space) {
  Mat q = random_orthogonal(rng, space.dim);
  const Mat E = space.orthonormal_frame();
  const bool want_positive = orientation == Orientation::positive;
  if ((q.determinant() * space.orientation > 0.0) != want_positive) q.col(0) *= -1.0;
  // frame = E q is g-orthonormal with the requested orientation.
  return make_complex_structure(E * q, space);
}

ComplexStructure random_orthogonal_complex_structure(std::uint64_t seed, Orientation orientation,
                                                     const EuclideanSpace& space) {
  Rng rng(seed);
  return random_orthogonal_complex_structure(rng, orientation, space);
}

HomValuedOneForm random_type10_one_form(Rng& rng, const Mat& J, int source_dim, int target_dim) {
  const int dim = static_cast<int>(J.rows());
  const CMat theta = unitary_coframe(J);
  HomValuedOneForm phi;
  phi.components.assign(dim, CMat::Zero(target_dim, source_dim));
  for (int a = 0; a < theta.rows(); ++a) {
    CMat L(target_dim, source_dim);
    for (int r = 0; r < target_dim; ++r)
      for (int c = 0; c < source_dim; ++c) L(r, c) = Complex(rng.normal(), rng.normal());
    for (int k = 0; k < dim; ++k) phi.components[k] += theta(a, k) * L;
  }
  return phi;
}

}  // namespace occert
