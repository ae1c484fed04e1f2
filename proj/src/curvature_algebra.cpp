#include "occert/curvature_algebra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace occert {

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_dim(const Mat& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) throw Error(ErrorKind::input, std::string(what) + " has wrong shape");
}

// f(v0, v1, v2, v3) and the partial gradient with respect to slot `slot`.
Vec slot_gradient(const CurvatureTensor& R, const std::array<Vec, 4>& v, int slot) {
  const int n = R.dim();
  Vec grad = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const std::array<int, 4> idx{i, j, k, l};
          double w = R(i, j, k, l);
          if (w == 0.0) continue;
          for (int s = 0; s < 4; ++s)
            if (s != slot) w *= v[s](idx[s]);
          grad(idx[slot]) += w;
        }
  return grad;
}

struct AscentResult {
  double value = 0.0;
  std::array<Vec, 4> point;
};

AscentResult ascend(const CurvatureTensor& R, std::array<Vec, 4> v, const SupNormOptions& options) {
  double f = R.evaluate(v[0], v[1], v[2], v[3]);
  double step = 1.0;
  for (int iter = 0; iter < options.iterations; ++iter) {
    const double sign = f >= 0.0 ? 1.0 : -1.0;
    std::array<Vec, 4> tangent;
    double gnorm2 = 0.0;
    for (int s = 0; s < 4; ++s) {
      const Vec grad = slot_gradient(R, v, s);
      tangent[s] = sign * (grad - grad.dot(v[s]) * v[s]);
      gnorm2 += tangent[s].squaredNorm();
    }
    if (std::sqrt(gnorm2) < options.gradient_tolerance) break;
    bool improved = false;
    while (step > 1e-14) {
      std::array<Vec, 4> trial;
      for (int s = 0; s < 4; ++s) trial[s] = (v[s] + step * tangent[s]).normalized();
      const double ft = R.evaluate(trial[0], trial[1], trial[2], trial[3]);
      if (std::abs(ft) > std::abs(f)) {
        v = trial;
        f = ft;
        improved = true;
        step = std::min(2.0 * step, 1e3);
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return {std::abs(f), v};
}

}  // namespace

double CurvatureTensor::evaluate(const Vec& x, const Vec& y, const Vec& z, const Vec& t) const {
  double sum = 0.0;
  for (int i = 0; i < dim_; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      if (y(j) == 0.0) continue;
      double inner = 0.0;
      for (int k = 0; k < dim_; ++k) {
        if (z(k) == 0.0) continue;
        double row = 0.0;
        for (int l = 0; l < dim_; ++l) row += (*this)(i, j, k, l) * t(l);
        inner += z(k) * row;
      }
      sum += x(i) * y(j) * inner;
    }
  }
  return sum;
}

CurvatureTensor CurvatureTensor::in_frame(const Mat& E) const {
  const int n = dim_;
  require_dim(E, n, "frame");
  // Contract one slot at a time.
  auto contract = [n](const std::vector<double>& in, const Mat& E, int slot) {
    std::vector<double> out(in.size(), 0.0);
    std::array<std::size_t, 4> stride{static_cast<std::size_t>(n) * n * n, static_cast<std::size_t>(n) * n,
                                      static_cast<std::size_t>(n), 1};
    for (std::size_t idx = 0; idx < in.size(); ++idx) {
      const double v = in[idx];
      if (v == 0.0) continue;
      const int old = static_cast<int>((idx / stride[slot]) % n);
      const std::size_t base = idx - static_cast<std::size_t>(old) * stride[slot];
      for (int a = 0; a < n; ++a) out[base + a * stride[slot]] += v * E(old, a);
    }
    return out;
  };
  CurvatureTensor out(n);
  out.data_ = data_;
  for (int slot = 0; slot < 4; ++slot) out.data_ = contract(out.data_, E, slot);
  return out;
}

double CurvatureTensor::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double CurvatureTensor::max_abs_component() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

CurvatureTensor& CurvatureTensor::operator+=(const CurvatureTensor& other) {
  if (other.dim_ != dim_) throw Error(ErrorKind::input, "dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CurvatureTensor& CurvatureTensor::operator-=(const CurvatureTensor& other) {
  if (other.dim_ != dim_) throw Error(ErrorKind::input, "dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CurvatureTensor& CurvatureTensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

CurvatureTensor kulkarni_nomizu_square(const Mat& g, double k) {
  const int n = static_cast<int>(g.rows());
  require_dim(g, n, "bilinear form");
  CurvatureTensor R(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) R(i, j, a, b) = k * (g(i, a) * g(j, b) - g(i, b) * g(j, a));
  return R;
}

double SymmetryReport::max() const {
  return std::max({antisym_first, antisym_second, pair_exchange, bianchi});
}

SymmetryReport validate_symmetries(const CurvatureTensor& R) {
  SymmetryReport rep;
  const int n = R.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double r = R(i, j, k, l);
          rep.antisym_first = std::max(rep.antisym_first, std::abs(r + R(j, i, k, l)));
          rep.antisym_second = std::max(rep.antisym_second, std::abs(r + R(i, j, l, k)));
          rep.pair_exchange = std::max(rep.pair_exchange, std::abs(r - R(k, l, i, j)));
          rep.bianchi = std::max(rep.bianchi, std::abs(r + R(j, k, i, l) + R(k, i, j, l)));
        }
  return rep;
}

std::vector<std::pair<int, int>> lambda2_basis(int dim) {
  std::vector<std::pair<int, int>> basis;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) basis.emplace_back(i, j);
  return basis;
}

CurvatureOperator curvature_operator(const CurvatureTensor& R, double symmetry_tolerance) {
  const SymmetryReport sym = validate_symmetries(R);
  const double scale = std::max(1.0, R.max_abs_component());
  const double worst = std::max({sym.antisym_first, sym.antisym_second, sym.pair_exchange});
  if (worst > symmetry_tolerance * scale)
    throw Error(ErrorKind::invalid_curvature, "curvature tensor symmetry violated by " + std::to_string(worst));
  const auto basis = lambda2_basis(R.dim());
  const int m = static_cast<int>(basis.size());
  CurvatureOperator op;
  op.matrix.resize(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      op.matrix(p, q) = R(basis[p].first, basis[p].second, basis[q].first, basis[q].second);
  const Mat sym_part = 0.5 * (op.matrix + op.matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym_part, Eigen::EigenvaluesOnly);
  op.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(op.spectrum.begin(), op.spectrum.end());
  return op;
}

TwoForm apply_curvature_operator(const CurvatureTensor& R, const TwoForm& beta) {
  const int n = R.dim();
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) out(i, j) += R(i, j, k, l) * beta.coeffs(k, l);
  return TwoForm(out);
}

Mat ricci(const CurvatureTensor& R) {
  const int n = R.dim();
  Mat ric = Mat::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int i = 0; i < n; ++i) ric(x, y) += R(x, i, y, i);
  return ric;
}

Mat ricci_star(const CurvatureTensor& R, const Mat& J) {
  const int n = R.dim();
  require_dim(J, n, "complex structure");
  // W(x, c) = sum_{i,d} R(x, i, c, d) J(d, i);  Ric*(x, y) = sum_c W(x, c) J(c, y)
  Mat W = Mat::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) W(x, c) += R(x, i, c, d) * J(d, i);
  return W * J;
}

Mat ricci_star_contracted(const CurvatureTensor& R, const Mat& J) {
  const int n = R.dim();
  require_dim(J, n, "complex structure");
  // sum_i R(x, c, i, Je_i) = sum_{i,d} R(x, c, i, d) J(d, i)
  Mat T = Mat::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int c = 0; c < n; ++c)
      for (int i = 0; i < n; ++i)
        for (int d = 0; d < n; ++d) T(x, c) += R(x, c, i, d) * J(d, i);
  return 0.5 * T * J;
}

TwoForm psi(const CurvatureTensor& R, const Mat& J, double tol) {
  const int n = R.dim();
  require_dim(J, n, "complex structure");
  Mat direct = Mat::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int i = 0; i < n; ++i)
        for (int d = 0; d < n; ++d) direct(x, y) += R(x, y, i, d) * J(d, i);
  const Mat via_ric_star = -2.0 * ricci_star(R, J) * J;
  const double gap = max_abs(direct - via_ric_star);
  const double scale = std::max(1.0, R.max_abs_component());
  if (gap > tol * scale)
    throw Error(ErrorKind::convention_mismatch,
                "sum R(X,Y,e_i,Je_i) and -2 Ric*(X,JY) disagree by " + std::to_string(gap));
  return TwoForm(direct);
}

Mat NablaJ::along(const Vec& x) const {
  Mat out = Mat::Zero(dim(), dim());
  for (int k = 0; k < dim(); ++k) out += x(k) * d[k];
  return out;
}

void validate_nabla_j(const Mat& J, const NablaJ& nabla, double tol) {
  const int n = static_cast<int>(J.rows());
  if (nabla.dim() != n) throw Error(ErrorKind::input, "nabla J has the wrong number of directions");
  for (int k = 0; k < n; ++k) {
    const Mat& D = nabla.d[k];
    require_dim(D, n, "nabla J component");
    const double scale = std::max(1.0, max_abs(D));
    if (max_abs(D * J + J * D) > tol * scale)
      throw Error(ErrorKind::input, "nabla J does not anticommute with J");
    if (max_abs(D + D.transpose()) > tol * scale) throw Error(ErrorKind::input, "nabla J is not skew");
  }
}

TwoForm phi(const Mat& J, const NablaJ& nabla, double tol) {
  validate_nabla_j(J, nabla, tol);
  const int n = nabla.dim();
  Mat traces(n, n);
  for (int x = 0; x < n; ++x)
    for (int c = 0; c < n; ++c) traces(x, c) = (nabla.d[x] * nabla.d[c]).trace();
  // phi(X, Y) = tr(D_X D_{JY}), with D_{JY} = sum_c (JY)_c D_c.
  const Mat value = traces * J;
  const double scale = std::max(1.0, max_abs(value));
  if (max_abs(value + value.transpose()) > tol * scale)
    throw Error(ErrorKind::input, "nabla J mixes types; tr(D_X D_JY) is not a 2-form");
  return TwoForm(value);
}

TwoForm chern_form(const CurvatureTensor& R, const Mat& J, const NablaJ& nabla, double tol) {
  const TwoForm p = psi(R, J, tol);
  const TwoForm f = phi(J, nabla, tol);
  return TwoForm((2.0 * p.coeffs + f.coeffs) / (8.0 * std::numbers::pi));
}

StarRicciData star_ricci_data(const CurvatureTensor& R, const Mat& J, const NablaJ& nabla, double tol) {
  return StarRicciData{ricci(R), ricci_star(R, J), psi(R, J, tol), phi(J, nabla, tol)};
}

FrameMatrix star_matrix(const CurvatureTensor& R, const Mat& frame, double frame_tolerance) {
  const int n = R.dim();
  const ComplexStructure J = make_complex_structure(frame, EuclideanSpace::standard(n), frame_tolerance);
  const CurvatureTensor Rf = R.in_frame(frame);
  FrameMatrix out;
  out.frame = frame;
  out.alpha = Mat::Zero(n, n);
  // 0-based: i# = i xor 1
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out.alpha(i, j) += Rf(i, k, j ^ 1, k ^ 1);
  out.a = 0.5 * (out.alpha + out.alpha.transpose());
  const Mat rs = ricci_star(R, J.J);
  out.M = frame.transpose() * (0.5 * (rs + rs.transpose())) * frame;
  return out;
}

SupNormBounds sup_norm_bounds(const CurvatureTensor& R, const SupNormOptions& options) {
  const int n = R.dim();
  SupNormBounds out;
  out.upper = R.frobenius_norm();

  // Axis-aligned quadruples.
  int best = 0;
  for (std::size_t idx = 0; idx < R.data().size(); ++idx)
    if (std::abs(R.data()[idx]) > std::abs(R.data()[best])) best = static_cast<int>(idx);
  {
    std::array<int, 4> ax{best / (n * n * n), (best / (n * n)) % n, (best / n) % n, best % n};
    for (int s = 0; s < 4; ++s) out.argmax[s] = Vec::Unit(n, ax[s]);
    out.lower = std::abs(R.data()[best]);
  }

  std::vector<AscentResult> results(options.multistarts);
  const Rng root(options.seed);
  parallel_for(options.multistarts, [&](int start) {
    Rng rng = root.split(static_cast<std::uint64_t>(start));
    std::array<Vec, 4> v;
    for (auto& x : v) x = rng.unit_vector(n);
    results[start] = ascend(R, v, options);
  });
  for (const auto& r : results)
    if (r.value > out.lower) {
      out.lower = r.value;
      out.argmax = r.point;
    }
  // The Frobenius bound is rigorous; rounding in the ascent can only push lower above it by ulps.
  out.lower = std::min(out.lower, out.upper);
  return out;
}

CurvatureTensor random_curvature_tensor(Rng& rng, int dim) {
  const auto basis = lambda2_basis(dim);
  const int m = static_cast<int>(basis.size());
  Mat S = rng.normal_matrix(m, m);
  S = (0.5 * (S + S.transpose())).eval();
  CurvatureTensor T(dim);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      const auto [i, j] = basis[p];
      const auto [k, l] = basis[q];
      const double v = S(p, q);
      T(i, j, k, l) = v;
      T(j, i, k, l) = -v;
      T(i, j, l, k) = -v;
      T(j, i, l, k) = v;
    }
  // Remove the totally antisymmetric part; what remains satisfies Bianchi.
  std::array<int, 4> perm{0, 1, 2, 3};
  std::vector<std::pair<std::array<int, 4>, int>> perms;
  do {
    int inversions = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (perm[a] > perm[b]) ++inversions;
    perms.emplace_back(perm, inversions % 2 == 0 ? 1 : -1);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CurvatureTensor R = T;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) {
          const std::array<int, 4> idx{i, j, k, l};
          double alt = 0.0;
          for (const auto& [p, sign] : perms) alt += sign * T(idx[p[0]], idx[p[1]], idx[p[2]], idx[p[3]]);
          R(i, j, k, l) -= alt / 24.0;
        }
  return R;
}

NablaJ random_nabla_j(Rng& rng, const Mat& J, NablaJKind kind) {
  const int n = static_cast<int>(J.rows());
  const Mat F = adapted_frame(J);
  std::vector<Mat> in_frame(n);
  if (kind == NablaJKind::hermitian) {
    for (int a = 0; a < n; a += 2) {
      const Mat S = random_skew(rng, n);
      const Mat D = 0.5 * (S + J * S * J);  // skew, anticommutes with J
      in_frame[a] = D;
      in_frame[a + 1] = J * D;  // direction F_{a+1} = J F_a
    }
  } else {
    if (n != 6) throw Error(ErrorKind::input, "nearly Kähler nabla J is generated in dimension 6 only");
    // g((nabla_X J)Y, Z) = Re(c theta^1 ^ theta^2 ^ theta^3)(X, Y, Z) in the adapted frame,
    // where theta^a = e^{2a-1} + i e^{2a} is a unitary (1,0)-coframe.
    const Complex c(rng.normal(), rng.normal());
    auto theta = [](int a, int v) { return v == 2 * a ? Complex(1.0) : v == 2 * a + 1 ? Complex(0.0, 1.0) : Complex(0.0); };
    auto psi = [&](int x, int y, int z) {
      CMat m(3, 3);
      for (int a = 0; a < 3; ++a) {
        m(a, 0) = theta(a, x);
        m(a, 1) = theta(a, y);
        m(a, 2) = theta(a, z);
      }
      return (c * m.determinant()).real();
    };
    for (int x = 0; x < n; ++x) {
      Mat D(n, n);
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) D(z, y) = psi(x, y, z);
      in_frame[x] = F * D * F.transpose();
    }
  }
  NablaJ out = NablaJ::zero(n);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) out.d[k] += F(k, m) * in_frame[m];
  return out;
}

}  // namespace occert
