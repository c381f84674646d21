// Benchmark comparing the OpenMP paths against their serial references:
// the row-parallel matmul kernel across sizes, and the experiment grid
// executor across thread counts. Both comparisons also verify that the
// parallel results are byte-identical to the serial ones.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>

#include <omp.h>

#include "erbp/harness.hpp"

using namespace erbp;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Matrix random_matrix(Rng& rng, std::size_t n) {
  Matrix m(n, n);
  for (double& x : m.data) x = rng.next_uniform(-1.0, 1.0);
  return m;
}

template <class Fn>
double time_best_of(int reps, Fn fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_ms();
    fn();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

void bench_matmul(bool quick) {
  std::printf("matmul: serial reference vs OpenMP row-parallel kernel\n");
  std::printf("%8s %6s %12s %12s %9s %9s\n", "size", "par?", "serial_ms", "omp_ms",
              "speedup", "bitwise");
  Rng rng(1);
  for (std::size_t n : {std::size_t{32}, std::size_t{64}, std::size_t{128},
                        std::size_t{256}, std::size_t{384}}) {
    if (quick && n > 128) break;
    const Matrix a = random_matrix(rng, n);
    const Matrix b = random_matrix(rng, n);
    const int reps = n <= 128 ? 20 : 5;
    Matrix serial_out, omp_out;
    const double serial_ms = time_best_of(reps, [&] { serial_out = matmul_serial(a, b); });
    const double omp_ms = time_best_of(reps, [&] { omp_out = matmul(a, b); });
    const bool parallel_path = n * n * n >= kMatmulParallelWork;
    const bool same = serial_out.data == omp_out.data;
    std::printf("%8zu %6s %12.3f %12.3f %8.2fx %9s\n", n, parallel_path ? "omp" : "ser",
                serial_ms, omp_ms, serial_ms / omp_ms, same ? "yes" : "NO");
  }
  std::printf("\n");
}

void bench_grid(bool quick) {
  ExperimentSpec spec;
  spec.name = "bench";
  spec.variants = {Variant::kErbpL2, Variant::kStandard};
  spec.n_halves = {quick ? std::size_t{3} : std::size_t{10}};
  spec.lambdas = {0.3, 3.0, 30.0};
  spec.seeds = quick ? 2 : 4;
  const auto plan = plan_runs(spec);

  std::printf("grid executor: %zu independent runs (n_half=%zu)\n", plan.size(),
              spec.n_halves[0]);
  std::printf("%12s %12s %9s %9s\n", "mode", "wall_ms", "speedup", "bytes");

  std::ostringstream serial_csv;
  const double serial_ms = time_best_of(1, [&] {
    emit_csv(make_rows(plan, run_grid_serial(plan)), serial_csv);
  });
  std::printf("%12s %12.1f %9s %9s\n", "serial", serial_ms, "1.00x", "ref");

  for (int threads : {2, 4}) {
    std::ostringstream csv;
    const double ms = time_best_of(1, [&] {
      emit_csv(make_rows(plan, run_grid(plan, threads)), csv);
    });
    std::printf("%9d thr %12.1f %8.2fx %9s\n", threads, ms, serial_ms / ms,
                csv.str() == serial_csv.str() ? "equal" : "DIFFER");
  }
  std::printf("(hardware threads available: %d)\n", omp_get_max_threads());
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  bench_matmul(quick);
  bench_grid(quick);
  return 0;
}
