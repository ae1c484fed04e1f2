#include "occert/positivity_certifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace occert {

namespace {

struct OrthonormalData {
  Mat frame;          // g-orthonormal frame E
  Mat frame_inverse;  // E^-1 = E^T g
  CurvatureTensor R;  // components in E
};

OrthonormalData to_orthonormal(const CurvatureTensor& R, const Mat& g, double max_condition = 1e8) {
  const EuclideanSpace space = EuclideanSpace::with_metric(g);
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  if (cond > max_condition)
    throw Error(ErrorKind::conditioning, "metric condition number " + std::to_string(cond) + " exceeds limit");
  OrthonormalData out;
  out.frame = space.orthonormal_frame();
  out.frame_inverse = out.frame.transpose() * g;
  out.R = R.in_frame(out.frame);
  return out;
}

struct DescentResult {
  double value = 0.0;
  Mat J;
};

// Local descent of lambda_min over the orbit Q J0 Q^T, Q <- exp(S) Q.
DescentResult descend(const CurvatureTensor& R, const Mat& start_q, const RefuteConfig& cfg) {
  const int n = R.dim();
  const Mat J0 = standard_complex_structure_matrix(n);
  std::vector<Mat> generators;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat B = Mat::Zero(n, n);
      B(i, j) = 1.0;
      B(j, i) = -1.0;
      generators.push_back(B);
    }
  auto value_at = [&](const Mat& q) { return star_ricci_min_eigen(R, q * J0 * q.transpose()); };

  Mat q = start_q;
  double f = value_at(q);
  double step = 1.0;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    Vec grad(static_cast<Eigen::Index>(generators.size()));
    for (std::size_t k = 0; k < generators.size(); ++k) {
      const Mat plus = (cfg.fd_step * generators[k]).exp() * q;
      const Mat minus = (-cfg.fd_step * generators[k]).exp() * q;
      grad(static_cast<Eigen::Index>(k)) = (value_at(plus) - value_at(minus)) / (2.0 * cfg.fd_step);
    }
    if (grad.norm() < 1e-10) break;
    Mat direction = Mat::Zero(n, n);
    for (std::size_t k = 0; k < generators.size(); ++k) direction -= grad(static_cast<Eigen::Index>(k)) * generators[k];
    direction /= grad.norm();
    bool improved = false;
    while (step > 1e-12) {
      const Mat trial = (step * direction).exp() * q;
      const double ft = value_at(trial);
      if (ft < f) {
        q = trial;
        f = ft;
        improved = true;
        step = std::min(2.0 * step, 2.0);
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return {f, q * J0 * q.transpose()};
}

}  // namespace

const char* to_string(PStatus s) {
  switch (s) {
    case PStatus::certified: return "certified";
    case PStatus::refuted: return "refuted";
    case PStatus::unknown: return "unknown";
  }
  return "unknown";
}

BhlResult check_bhl(const std::vector<double>& spectrum, std::size_t expected_length) {
  if (spectrum.size() != expected_length)
    throw Error(ErrorKind::input, "spectrum has length " + std::to_string(spectrum.size()) + ", expected " +
                                      std::to_string(expected_length));
  if (!std::is_sorted(spectrum.begin(), spectrum.end()))
    throw Error(ErrorKind::input, "spectrum must be sorted ascending");
  BhlResult r;
  r.lambda_min = spectrum.front();
  r.lambda_max = spectrum.back();
  r.margin = 7.0 * r.lambda_min - 5.0 * r.lambda_max;
  const double scale = std::max(std::abs(r.lambda_min), std::abs(r.lambda_max));
  const double tie = 1e-12 * scale;
  r.boundary = scale == 0.0 || std::abs(r.lambda_min) <= tie || std::abs(r.margin) <= tie;
  r.pass = !r.boundary && r.lambda_min > 0.0 && r.margin > 0.0;
  return r;
}

SufficientResult certify_P_sufficient(const CurvatureTensor& R, const Mat& g, std::optional<double> tight_bound) {
  const OrthonormalData data = to_orthonormal(R, g);
  const int n = R.dim();
  const CurvatureTensor deviation = data.R - kulkarni_nomizu_square(Mat::Identity(n, n));
  SufficientResult out;
  out.threshold = 1.0 / n;  // 1 / (2 * complex dimension)
  out.frobenius_bound = deviation.frobenius_norm();
  out.bound_used = out.frobenius_bound;
  if (tight_bound) {
    if (!(*tight_bound >= 0.0)) throw Error(ErrorKind::input, "tight bound must be nonnegative");
    out.bound_used = std::min(out.bound_used, *tight_bound);
  }
  out.status = out.bound_used <= out.threshold ? PStatus::certified : PStatus::unknown;
  return out;
}

double star_ricci_min_eigen(const CurvatureTensor& R, const Mat& J, Vec* eigenvector) {
  const Mat rs = ricci_star(R, J);
  const Mat sym = 0.5 * (rs + rs.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (eigenvector) *eigenvector = es.eigenvectors().col(0);
  return es.eigenvalues()(0);
}

RefuteResult refute_P(const CurvatureTensor& R, const Mat& g, const RefuteConfig& cfg) {
  const OrthonormalData data = to_orthonormal(R, g);
  const int n = R.dim();
  const Rng root(cfg.seed);
  std::vector<DescentResult> results(cfg.multistarts);
  parallel_for(cfg.multistarts, [&](int start) {
    Rng rng = root.split(static_cast<std::uint64_t>(start));
    Mat q = random_orthogonal(rng, n);
    const bool positive = cfg.both_orientations ? (start % 2 == 0) : true;
    if ((q.determinant() > 0.0) != positive) q.col(0) *= -1.0;
    results[start] = descend(data.R, q, cfg);
  });

  RefuteResult out;
  out.best_value = std::numeric_limits<double>::infinity();
  const DescentResult* best = nullptr;
  for (const auto& r : results)
    if (r.value < out.best_value) {
      out.best_value = r.value;
      best = &r;
    }
  if (best && best->value < -cfg.tolerance) {
    Vec x;
    const double value = star_ricci_min_eigen(data.R, best->J, &x);
    Witness w;
    w.J.J = data.frame * best->J * data.frame_inverse;
    w.J.compatible_orientation = orientation_compatible(EuclideanSpace::with_metric(g), w.J.J);
    w.X = data.frame * x;  // g-unit
    w.value = value;
    out.witness = w;
  }
  return out;
}

bool sylvester_psd(const Mat& m, double tol) {
  const int n = static_cast<int>(m.rows());
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    Mat sub(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = m(idx[r], idx[c]);
    if (sub.determinant() < -tol * std::pow(scale, static_cast<double>(idx.size()))) return false;
  }
  return true;
}

LemmaLLResult check_lemma_LL(const TwoForm& zeta0, const TwoForm& zeta, const ComplexStructure& J,
                             const EuclideanSpace& space, double tol) {
  LemmaLLResult r;
  const TwoForm omega = fundamental_two_form(space, J, Tolerances{1e-9, tol});
  r.zeta0_type_11 = is_type_11(zeta0, J.J, tol);
  r.zeta_type_11 = is_type_11(zeta, J.J, tol);
  const TwoForm excess(zeta0.coeffs - omega.coeffs);
  const FormClass cls = is_positive_form(excess, J, tol);
  r.zeta0_dominates_omega = cls == FormClass::positive || cls == FormClass::nonnegative;
  r.distance = norm_lambda2(space, TwoForm(zeta.coeffs - zeta0.coeffs));
  r.radius = 1.0 / (2.0 * std::sqrt(static_cast<double>(space.complex_dim())));
  r.within_radius = r.distance <= r.radius;
  r.hypotheses_met = r.zeta0_type_11 && r.zeta_type_11 && r.zeta0_dominates_omega && r.within_radius;
  const Mat E = space.orthonormal_frame();
  r.det_value = (E.transpose() * zeta.coeffs * E).determinant();
  r.nondegenerate = std::abs(r.det_value) > std::pow(1e-9, space.dim);
  return r;
}

BudgetResult perturbation_budget_check(const PerturbationBudget& b) {
  if (!(b.eps1 >= 0.0) || !(b.eps2 >= 0.0)) throw Error(ErrorKind::input, "perturbation budget must be nonnegative");
  BudgetResult r;
  r.quadratic_ok = b.eps1 + 4.0 * b.eps2 + 2.0 * b.eps2 * b.eps2 <= 1.0 / 6.0;
  r.linear_ok = b.eps1 + (2.0 + std::sqrt(13.0 / 3.0)) * b.eps2 <= 1.0 / 6.0;
  r.implied_bound = b.eps1 + 2.0 * b.eps2 * (2.0 + b.eps2);
  return r;
}

LemmaLLResult lemma_ll_demo(const CurvatureTensor& R, const CurvatureOperator& op, const Mat& J) {
  const int n = R.dim();
  const ComplexStructure cs{J, true};
  const EuclideanSpace space = EuclideanSpace::standard(n);
  const TwoForm omega = fundamental_two_form(space, cs);
  const double centre = 0.5 * (op.lambda_min() + op.lambda_max());
  const double scale = centre != 0.0 ? 1.0 / centre : 1.0;
  TwoForm image = apply_curvature_operator(R, omega);
  image.coeffs *= scale;
  return check_lemma_LL(omega, project_11(image, J), cs, space);
}

Certificate certify_point(const CurvatureTensor& R, const Mat& g, const CertifyOptions& options) {
  const OrthonormalData data = to_orthonormal(R, g, options.max_condition_number);
  const int n = R.dim();
  Certificate cert;
  std::ostringstream notes;
  cert.curvature_operator = curvature_operator(data.R, options.symmetry_tolerance);
  if (options.bhl) {
    cert.bhl = check_bhl(cert.curvature_operator.spectrum, static_cast<std::size_t>(n * (n - 1) / 2));
    if (cert.bhl->boundary) notes << "pinching holds only up to round-off; reported as fail. ";
  }

  const CurvatureTensor deviation = data.R - kulkarni_nomizu_square(Mat::Identity(n, n));
  if (options.sup_norm_lower) {
    cert.deviation_bounds = sup_norm_bounds(deviation, options.sup_norm);
  } else {
    cert.deviation_bounds.upper = deviation.frobenius_norm();
  }

  if (options.p_sufficient) {
    cert.sufficient = certify_P_sufficient(data.R, Mat::Identity(n, n), options.tight_bound);
    cert.deviation_bounds.upper = cert.sufficient->bound_used;
    if (cert.sufficient->status == PStatus::certified) cert.p_membership = PStatus::certified;
  }
  if (cert.p_membership != PStatus::certified) {
    if (options.p_refute) {
      const RefuteResult ref = refute_P(data.R, Mat::Identity(n, n), options.refute);
      cert.refute_best_value = ref.best_value;
      if (ref.witness) {
        Witness w = *ref.witness;
        w.J.J = data.frame * w.J.J * data.frame_inverse;
        w.X = data.frame * w.X;
        cert.witness = w;
        cert.p_membership = PStatus::refuted;
      } else {
        notes << "no witness found in " << options.refute.multistarts << " starts; membership undecided. ";
      }
    } else if (options.p_sufficient) {
      notes << "sufficient bound " << cert.deviation_bounds.upper << " exceeds " << 1.0 / n << ". ";
    }
  }
  if (options.lemma_ll) cert.lemma_ll = lemma_ll_demo(data.R, cert.curvature_operator, standard_complex_structure_matrix(n));
  cert.notes = notes.str();
  if (!cert.notes.empty()) cert.notes.pop_back();
  return cert;
}

}  // namespace occert
