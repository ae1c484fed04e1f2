#include "occert/common.hpp"

#include <cstdlib>
#include <thread>

namespace occert {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::frame: return "frame";
    case ErrorKind::compatibility: return "compatibility";
    case ErrorKind::skewness: return "skewness";
    case ErrorKind::structure: return "structure";
    case ErrorKind::type: return "type";
    case ErrorKind::invalid_curvature: return "invalid-curvature";
    case ErrorKind::convention_mismatch: return "convention-mismatch";
    case ErrorKind::input: return "input";
    case ErrorKind::metric: return "metric";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::finite_difference_quality: return "finite-difference-quality";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// splitmix64 finalizer
std::uint64_t Rng::mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1))) {}

Rng Rng::split(std::uint64_t index) const { return Rng(mix(seed_ ^ mix(stream_ + 0x632be59bd9b4e019ULL)), index); }

Vec Rng::normal_vector(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Mat Rng::normal_matrix(int rows, int cols) {
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

Vec Rng::unit_vector(int n) {
  Vec v = normal_vector(n);
  while (v.norm() < 1e-12) v = normal_vector(n);
  return v / v.norm();
}

int worker_count() {
  if (const char* env = std::getenv("OCCERT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace occert
