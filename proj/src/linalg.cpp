#include "erbp/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_set>

#include <omp.h>

#include "erbp/errors.hpp"

namespace erbp {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) word = splitmix64(s);
  // xoshiro must not start from the all-zero state
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
    state_[0] = 0x9E3779B97F4A7C15ULL;
  }
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  // reject draws above the largest multiple of bound
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

Rng Rng::split() {
  return Rng(next_u64());
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (std::abs(a.data[i] - b.data[i]) > tol) return false;
  }
  return true;
}

namespace {

void check_matmul_dims(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "matmul: dimension mismatch (%zux%zu * %zux%zu)",
                  a.rows, a.cols, b.rows, b.cols);
    throw ConfigError(buf);
  }
}

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& out, std::size_t i) {
  for (std::size_t j = 0; j < b.cols; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
    out(i, j) = acc;
  }
}

}  // namespace

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
  check_matmul_dims(a, b);
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) matmul_row(a, b, out, i);
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_matmul_dims(a, b);
  const std::size_t work = a.rows * a.cols * b.cols;
  if (work < kMatmulParallelWork) return matmul_serial(a, b);
  Matrix out(a.rows, b.cols);
  const std::int64_t n = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    matmul_row(a, b, out, static_cast<std::size_t>(i));
  }
  return out;
}

Vector mat_vec(const Matrix& m, const Vector& x) {
  if (m.cols != x.size()) throw ConfigError("mat_vec: dimension mismatch");
  Vector y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    const double* row = &m.data[i * m.cols];
    for (std::size_t k = 0; k < m.cols; ++k) acc += row[k] * x[k];
    y[i] = acc;
  }
  return y;
}

Vector mat_tvec(const Matrix& m, const Vector& x) {
  if (m.rows != x.size()) throw ConfigError("mat_tvec: dimension mismatch");
  Vector y(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double xi = x[i];
    const double* row = &m.data[i * m.cols];
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += row[j] * xi;
  }
  return y;
}

void add_outer(Matrix& m, const Vector& x, const Vector& y, double scale) {
  if (m.rows != x.size() || m.cols != y.size()) {
    throw ConfigError("add_outer: dimension mismatch");
  }
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double xi = scale * x[i];
    double* row = &m.data[i * m.cols];
    for (std::size_t j = 0; j < m.cols; ++j) row[j] += xi * y[j];
  }
}

Vector relu(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? v[i] : 0.0;
  return out;
}

Vector relu_grad(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? 1.0 : 0.0;
  return out;
}

Vector softmax(const Vector& v) {
  double mx = v[0];
  for (double x : v) mx = x > mx ? x : mx;
  Vector out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

std::vector<std::size_t> sample_without_replacement(Rng& rng,
                                                    std::size_t population_size,
                                                    std::size_t k) {
  if (k > population_size) {
    throw ConfigError("sample_without_replacement: k exceeds population size");
  }
  // Floyd's algorithm: k iterations, no O(population) allocation.
  std::vector<std::size_t> result;
  result.reserve(k);
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(k * 2);
  for (std::size_t i = population_size - k; i < population_size; ++i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
    if (chosen.insert(j).second) {
      result.push_back(j);
    } else {
      chosen.insert(i);
      result.push_back(i);
    }
  }
  return result;
}

}  // namespace erbp
