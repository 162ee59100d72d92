#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <random>
#include <string>

#include "netfactor/numerics.hpp"
#include "netfactor/simharness.hpp"
#include "netfactor/spectral.hpp"

namespace {

using namespace netfactor;
using clock_type = std::chrono::steady_clock;

double seconds_of(clock_type::time_point start, clock_type::time_point stop) {
  return std::chrono::duration<double>(stop - start).count();
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

// Hurwitz matrix with every eigenvalue real part at or below -margin.
Matrix random_stable(std::mt19937_64& rng, int n, double margin) {
  Matrix a = random_matrix(rng, n, n);
  Eigen::EigenSolver<Matrix> eig(a);
  double worst = eig.eigenvalues().real().maxCoeff();
  a -= (worst + margin) * Matrix::Identity(n, n);
  return a;
}

AreProblem seeded_are(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AreProblem p;
  p.a = random_stable(rng, n, 0.5);
  Matrix b = random_matrix(rng, n, n);
  p.g = b * b.transpose();
  Matrix w = random_matrix(rng, n, n);
  p.q = w * w.transpose();
  p.quadratic_sign = -1;
  return p;
}

struct Row {
  std::string name;
  double serial = 0.0;
  double parallel = 0.0;
};

void print_row(const Row& row) {
  std::cout << std::left << std::setw(34) << row.name << std::right << std::fixed
            << std::setprecision(3) << std::setw(10) << row.serial << std::setw(10)
            << row.parallel << std::setw(9) << std::setprecision(2)
            << row.serial / std::max(row.parallel, 1e-9) << "x\n";
}

Row bench_are() {
  AreProblem p = seeded_are(11, 2024);
  Row row{"riccati candidate evaluation"};

  auto t0 = clock_type::now();
  AreSolutionSet serial = enumerate_are_solutions(p, 1e-9, 12, Execution::Serial);
  auto t1 = clock_type::now();
  AreSolutionSet parallel = enumerate_are_solutions(p, 1e-9, 12, Execution::Parallel);
  auto t2 = clock_type::now();

  row.serial = seconds_of(t0, t1);
  row.parallel = seconds_of(t1, t2);
  if (serial.solutions.size() != parallel.solutions.size())
    std::cout << "warning: serial and parallel solution counts differ\n";
  return row;
}

Row bench_phi() {
  std::mt19937_64 rng(99);
  int n = 40;
  int p = 6;
  StateSpace sys;
  sys.a = random_stable(rng, n, 0.3);
  sys.b = random_matrix(rng, n, p);
  sys.c = Matrix::Zero(p, n);
  sys.c.leftCols(p) = Matrix::Identity(p, p);
  sys.d = Matrix::Zero(p, p);

  FrequencyGrid grid;
  grid.log_points = 20000;
  grid.random_points = 0;

  Row row{"spectral density comparison"};
  auto t0 = clock_type::now();
  bool eq_serial = phi_equal(sys, sys, grid, 1e-6, Execution::Serial);
  auto t1 = clock_type::now();
  bool eq_parallel = phi_equal(sys, sys, grid, 1e-6, Execution::Parallel);
  auto t2 = clock_type::now();

  row.serial = seconds_of(t0, t1);
  row.parallel = seconds_of(t1, t2);
  if (!eq_serial || !eq_parallel) std::cout << "warning: self-comparison failed\n";
  return row;
}

Row bench_experiment() {
  ExperimentConfig cfg;
  cfg.trials = 60;
  cfg.seed = 7;
  cfg.dims.l2_min = 0;
  cfg.dims.l2_max = 4;

  Row row{"random-system study"};
  cfg.mode = Execution::Serial;
  auto t0 = clock_type::now();
  ExperimentResult serial = run_experiment(cfg);
  auto t1 = clock_type::now();
  cfg.mode = Execution::Parallel;
  ExperimentResult parallel = run_experiment(cfg);
  auto t2 = clock_type::now();

  row.serial = seconds_of(t0, t1);
  row.parallel = seconds_of(t1, t2);
  std::size_t ok_serial = 0;
  std::size_t ok_parallel = 0;
  for (const TrialRecord& r : serial.records)
    if (r.status == TrialStatus::Ok) ++ok_serial;
  for (const TrialRecord& r : parallel.records)
    if (r.status == TrialStatus::Ok) ++ok_parallel;
  if (ok_serial != ok_parallel)
    std::cout << "warning: serial and parallel trial outcomes differ\n";
  return row;
}

}  // namespace

int main() {
  std::cout << std::left << std::setw(34) << "kernel" << std::right << std::setw(10)
            << "serial" << std::setw(10) << "parallel" << std::setw(10) << "speedup\n";
  print_row(bench_are());
  print_row(bench_phi());
  print_row(bench_experiment());
  return 0;
}
