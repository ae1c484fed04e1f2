#pragma once

// Decision layer over pointwise curvature data: spectral pinching of the
// curvature operator, membership in the class P of algebraic curvature
// tensors with Ric*_R(X,X) >= 0 for every orthogonal J, the perturbation
// lemma for (1,1)-forms, and the metric perturbation budget.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "occert/curvature_algebra.hpp"
#include "occert/hermitian_linalg.hpp"

namespace occert {

struct BhlResult {
  bool pass = false;
  bool boundary = false;  // a strict inequality holds only up to round-off
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double margin = 0.0;  // 7 lambda_min - 5 lambda_max
};

/// lambda_min > 0 and 5 lambda_max < 7 lambda_min on an ascending spectrum.
BhlResult check_bhl(const std::vector<double>& spectrum, std::size_t expected_length = 15);

enum class PStatus { certified, refuted, unknown };
const char* to_string(PStatus s);

struct SufficientResult {
  PStatus status = PStatus::unknown;  // certified or unknown, never refuted
  double frobenius_bound = 0.0;       // |R - g⊼g|_F in a g-orthonormal frame
  double bound_used = 0.0;
  double threshold = 0.0;             // 1 / (2n)
};

/// Certified when an upper bound for |R - g⊼g|_inf is at most 1/(2n).
/// `tight_bound` lets a caller supply a sharper rigorous bound.
SufficientResult certify_P_sufficient(const CurvatureTensor& R, const Mat& g,
                                      std::optional<double> tight_bound = std::nullopt);

struct Witness {
  ComplexStructure J;
  Vec X;
  double value = 0.0;  // Ric*(X, X) < 0
};

struct RefuteConfig {
  int multistarts = 64;
  int iterations = 60;
  double tolerance = 1e-9;
  double fd_step = 1e-6;
  bool both_orientations = false;
  std::uint64_t seed = 0x7e5f;
};

struct RefuteResult {
  std::optional<Witness> witness;
  double best_value = 0.0;  // smallest lambda_min(sym Ric*) seen
};

/// lambda_min of sym Ric*_R for J, with its eigenvector. Orthonormal data.
double star_ricci_min_eigen(const CurvatureTensor& R, const Mat& J, Vec* eigenvector = nullptr);

/// Multistart descent of lambda_min(sym Ric*(J)) over orthogonal J.
/// Finding nothing is not a proof of membership.
RefuteResult refute_P(const CurvatureTensor& R, const Mat& g, const RefuteConfig& config = {});

/// Positive semidefiniteness through all principal minors.
bool sylvester_psd(const Mat& symmetric, double tol = 1e-9);

struct LemmaLLResult {
  bool hypotheses_met = false;
  bool nondegenerate = false;
  double det_value = 0.0;
  bool zeta0_type_11 = false;
  bool zeta_type_11 = false;
  bool zeta0_dominates_omega = false;
  bool within_radius = false;
  double distance = 0.0;  // |zeta - zeta0|_{Lambda^2}
  double radius = 0.0;    // 1 / (2 sqrt(n))
};

LemmaLLResult check_lemma_LL(const TwoForm& zeta0, const TwoForm& zeta, const ComplexStructure& J,
                             const EuclideanSpace& space = EuclideanSpace::standard(), double tol = 1e-9);

struct PerturbationBudget {
  double eps1 = 0.0;  // |R - R_0|_inf
  double eps2 = 0.0;  // |g - g_0|_inf
};

struct BudgetResult {
  bool quadratic_ok = false;  // eps1 + 4 eps2 + 2 eps2^2 <= 1/6
  bool linear_ok = false;     // eps1 + (2 + sqrt(13/3)) eps2 <= 1/6
  double implied_bound = 0.0; // eps1 + 2 eps2 (2 + eps2)
};

BudgetResult perturbation_budget_check(const PerturbationBudget& budget);

struct CertifyOptions {
  bool bhl = true;
  bool p_sufficient = true;
  bool p_refute = true;
  bool sup_norm_lower = true;
  bool lemma_ll = false;  // runs lemma_ll_demo with the standard J
  std::optional<double> tight_bound;
  double symmetry_tolerance = 1e-6;  // loosen for finite-difference curvature
  RefuteConfig refute;
  SupNormOptions sup_norm;
  double max_condition_number = 1e8;
};

struct Certificate {
  CurvatureOperator curvature_operator;
  std::optional<BhlResult> bhl;
  PStatus p_membership = PStatus::unknown;
  std::optional<SufficientResult> sufficient;
  SupNormBounds deviation_bounds;  // for R - g⊼g
  std::optional<Witness> witness;
  std::optional<double> refute_best_value;
  std::optional<LemmaLLResult> lemma_ll;
  std::string notes;
};

Certificate certify_point(const CurvatureTensor& R, const Mat& g, const CertifyOptions& options = {});

/// Lemma check with zeta0 = omega and zeta the (1,1)-part of the curvature
/// operator applied to omega, after rescaling the spectrum to be centred on 1.
LemmaLLResult lemma_ll_demo(const CurvatureTensor& R, const CurvatureOperator& op, const Mat& J);

}  // namespace occert
