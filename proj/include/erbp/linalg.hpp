#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace erbp {

using Vector = std::vector<double>;

// Dense row-major matrix. Everything in this project is double precision;
// the networks are tiny, so precision beats speed everywhere.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols entries, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }

  static Matrix identity(std::size_t n);
};

bool approx_equal(const Matrix& a, const Matrix& b, double tol);

// xoshiro256** seeded via splitmix64. Fully specified here (no standard-library
// distributions) so equal seeds give equal draw sequences on every platform.
// Each run owns its own instance; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double next_double();
  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi);
  // Uniform in [0, bound), unbiased via rejection. bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound);
  // Independent child stream; advances this generator by one draw.
  Rng split();

 private:
  std::array<std::uint64_t, 4> state_;
};

// Deterministic Fisher-Yates.
template <class T>
void shuffle(Rng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.next_below(i)]);
  }
}

// Serial reference product. Kept separate so the OpenMP path can be pinned
// against it bit for bit.
Matrix matmul_serial(const Matrix& a, const Matrix& b);

// Product that goes row-parallel (OpenMP) once rows*inner*cols crosses a work
// threshold and runs the serial loop below it. Row partitioning leaves the
// per-element accumulation order unchanged, so the result is bitwise identical
// to matmul_serial for any thread count.
Matrix matmul(const Matrix& a, const Matrix& b);

// Work threshold (multiply-accumulate count) above which matmul parallelizes.
inline constexpr std::size_t kMatmulParallelWork = std::size_t{1} << 18;

// y = m x
Vector mat_vec(const Matrix& m, const Vector& x);
// y = m^T x
Vector mat_tvec(const Matrix& m, const Vector& x);
// m += scale * x y^T
void add_outer(Matrix& m, const Vector& x, const Vector& y, double scale = 1.0);

// Elementwise max(0, x).
Vector relu(const Vector& v);
// 1 where x > 0, else 0. Subgradient at exactly 0 is 0.
Vector relu_grad(const Vector& v);
// Max-subtracted for stability; outputs positive and sum to 1.
Vector softmax(const Vector& v);

// k distinct indices uniform over [0, population_size), deterministic given
// the generator state. Order is the insertion order of Floyd's algorithm.
std::vector<std::size_t> sample_without_replacement(Rng& rng,
                                                    std::size_t population_size,
                                                    std::size_t k);

}  // namespace erbp
