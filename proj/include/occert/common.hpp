#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace occert {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

enum class ErrorKind {
  frame,
  compatibility,
  skewness,
  structure,
  type,
  invalid_curvature,
  convention_mismatch,
  input,
  metric,
  conditioning,
  finite_difference_quality,
  config,
  io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to a record or an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Tolerances {
  double construction = 1e-12;    // J^2 = -Id, orthogonality, skewness
  double classification = 1e-9;   // positivity / type decisions
};

/// Deterministic, splittable random source. A stream is identified by a
/// (seed, counter) pair; child streams are derived by hashing, never by
/// consuming the parent, so results do not depend on evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  Rng split(std::uint64_t index) const;

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  Vec normal_vector(int n);
  Mat normal_matrix(int rows, int cols);
  Vec unit_vector(int n);

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Worker count: OCCERT_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads.
template <class Body>
void parallel_for(int n, Body&& body);

}  // namespace occert

#include "occert/detail/parallel.hpp"
