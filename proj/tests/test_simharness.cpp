#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "netfactor/simharness.hpp"
#include "oracles.hpp"

using namespace netfactor;

TEST_CASE("per-trial seeds are deterministic and spread out") {
  CHECK(derive_trial_seed(1, 0) == derive_trial_seed(1, 0));
  std::set<std::uint64_t> seen;
  for (int trial = 0; trial < 200; ++trial) seen.insert(derive_trial_seed(1, trial));
  CHECK(seen.size() == 200);
  CHECK(derive_trial_seed(1, 5) != derive_trial_seed(2, 5));
}

TEST_CASE("dimension draws are consistent and respect the ranges") {
  DimRanges ranges;
  ranges.p_min = 2;
  ranges.p_max = 4;
  ranges.l2_min = 1;
  ranges.l2_max = 3;
  ranges.l_max = 8;
  std::mt19937_64 rng(99);
  for (int k = 0; k < 300; ++k) {
    TrialDims dims = draw_dims(ranges, rng);
    CHECK(dims.p >= ranges.p_min);
    CHECK(dims.p <= ranges.p_max);
    CHECK(dims.p1 + dims.p2 + dims.p3 == dims.p);
    CHECK(dims.l == 2 * dims.p1 + dims.p2 + dims.l2);
    CHECK(dims.l <= ranges.l_max);
    CHECK(dims.l2 >= 0);
    CHECK(dims.l2 <= ranges.l2_max);
  }
}

TEST_CASE("random systems honor the requested dimensions and assumptions") {
  std::mt19937_64 rng(123);
  DimRanges ranges;
  ranges.p_min = 2;
  ranges.p_max = 4;
  ranges.l2_min = 0;
  ranges.l2_max = 3;
  ranges.l_max = 8;
  for (int k = 0; k < 10; ++k) {
    TrialDims dims = draw_dims(ranges, rng);
    StateSpace sys = random_system(dims, rng);
    CHECK(sys.order() == dims.p + dims.l);
    CHECK(sys.outputs() == dims.p);
    CHECK(sys.inputs() == dims.p);
    AssumptionReport shape = validate_assumptions(sys);
    CHECK(shape.hurwitz);
    CHECK(shape.minimal);
    CHECK(shape.c_is_identity_zero);
    CHECK(shape.d_is_zero);
    CHECK(shape.p_diagonal);

    // prescribed relative degree multiset survives the hiding transformations
    std::vector<int> deg = v_relative_degrees(partition(sys));
    int d2 = 0;
    int d1 = 0;
    int d0 = 0;
    for (int d : deg) {
      if (d >= 2) ++d2;
      else if (d == 1) ++d1;
      else ++d0;
    }
    CHECK(d2 == dims.p1);
    CHECK(d1 == dims.p2);
    CHECK(d0 == dims.p3);
  }
}

TEST_CASE("random system generation is reproducible from the stream state") {
  TrialDims dims;
  dims.p = 3;
  dims.p1 = 1;
  dims.p2 = 1;
  dims.p3 = 1;
  dims.l2 = 2;
  dims.l = 2 * dims.p1 + dims.p2 + dims.l2;
  std::mt19937_64 rng_a(77);
  std::mt19937_64 rng_b(77);
  StateSpace sys_a = random_system(dims, rng_a);
  StateSpace sys_b = random_system(dims, rng_b);
  CHECK(oracles::max_abs_diff(sys_a.a, sys_b.a) == 0.0);
  CHECK(oracles::max_abs_diff(sys_a.b, sys_b.b) == 0.0);
}

TEST_CASE("experiment runs are deterministic and internally consistent") {
  ExperimentConfig cfg;
  cfg.trials = 24;
  cfg.seed = 11;
  cfg.dims.p_min = 2;
  cfg.dims.p_max = 3;
  cfg.dims.l2_min = 0;
  cfg.dims.l2_max = 2;
  cfg.dims.l_max = 6;

  ExperimentResult first = run_experiment(cfg);
  ExperimentResult second = run_experiment(cfg);
  REQUIRE(first.records.size() == 24);
  REQUIRE(second.records.size() == 24);

  for (std::size_t k = 0; k < first.records.size(); ++k) {
    const TrialRecord& a = first.records[k];
    const TrialRecord& b = second.records[k];
    CHECK(a.trial == static_cast<int>(k));
    CHECK(a.status == b.status);
    CHECK(a.are_count == b.are_count);
    CHECK(a.admissible_count == b.admissible_count);
    CHECK(a.diagonal_count == b.diagonal_count);
    CHECK(a.seed == b.seed);
    CHECK(a.seed == derive_trial_seed(cfg.seed, a.trial));
    CHECK(a.dims.p1 + a.dims.p2 + a.dims.p3 == a.dims.p);
    CHECK(a.dims.l == 2 * a.dims.p1 + a.dims.p2 + a.dims.l2);

    if (a.status == TrialStatus::Ok) {
      CHECK(a.are_count >= 1);
      CHECK(a.admissible_count <= a.are_count);
      CHECK(a.diagonal_count <= a.admissible_count);
      CHECK(a.diagonal_count >= 1);
      // the trivial completion always survives the funnel
      if (a.dims.l2 == 0) {
        CHECK(a.are_count == 1);
        CHECK(a.diagonal_count == 1);
      }
    }
    if (a.status == TrialStatus::Failed) CHECK_FALSE(a.error.empty());
  }

  // serial execution produces the records of the parallel run
  ExperimentConfig serial_cfg = cfg;
  serial_cfg.mode = Execution::Serial;
  ExperimentResult serial = run_experiment(serial_cfg);
  REQUIRE(serial.records.size() == first.records.size());
  for (std::size_t k = 0; k < first.records.size(); ++k) {
    CHECK(serial.records[k].status == first.records[k].status);
    CHECK(serial.records[k].are_count == first.records[k].are_count);
    CHECK(serial.records[k].admissible_count == first.records[k].admissible_count);
    CHECK(serial.records[k].diagonal_count == first.records[k].diagonal_count);
  }
}

TEST_CASE("summaries aggregate records by latent excess") {
  ExperimentConfig cfg;
  cfg.trials = 30;
  cfg.seed = 5;
  cfg.dims.p_min = 2;
  cfg.dims.p_max = 3;
  cfg.dims.l2_min = 0;
  cfg.dims.l2_max = 2;
  cfg.dims.l_max = 6;
  ExperimentResult result = run_experiment(cfg);

  int total = 0;
  int last_l2 = -1;
  for (const StratumSummary& row : result.summary) {
    CHECK(row.l2 > last_l2);
    last_l2 = row.l2;
    CHECK(row.trials == row.ok + row.continuum + row.skipped + row.failed);
    total += row.trials;

    int ok_trials = 0;
    double are_sum = 0.0;
    for (const TrialRecord& rec : result.records) {
      if (rec.dims.l2 != row.l2) continue;
      if (rec.status != TrialStatus::Ok) continue;
      ++ok_trials;
      are_sum += rec.are_count;
    }
    CHECK(row.ok == ok_trials);
    if (ok_trials > 0) CHECK(std::abs(row.mean_are - are_sum / ok_trials) <= 1e-12);
  }
  CHECK(total == cfg.trials);
}

TEST_CASE("oversized quadratic equations are skipped, not attempted") {
  ExperimentConfig cfg;
  cfg.trials = 10;
  cfg.seed = 3;
  cfg.dims.p_min = 2;
  cfg.dims.p_max = 2;
  cfg.dims.l2_min = 3;
  cfg.dims.l2_max = 4;
  cfg.dims.l_max = 8;
  cfg.max_are_dim = 2;
  ExperimentResult result = run_experiment(cfg);
  REQUIRE(result.records.size() == 10);
  for (const TrialRecord& rec : result.records) CHECK(rec.status == TrialStatus::Skipped);
}

TEST_CASE("trial csv carries one labeled row per trial") {
  ExperimentConfig cfg;
  cfg.trials = 6;
  cfg.seed = 21;
  cfg.dims.p_min = 2;
  cfg.dims.p_max = 2;
  cfg.dims.l2_min = 0;
  cfg.dims.l2_max = 1;
  cfg.dims.l_max = 5;
  ExperimentResult result = run_experiment(cfg);

  std::ostringstream trials_out;
  write_trials_csv(result.records, trials_out);
  std::istringstream lines(trials_out.str());
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "trial,p,l,l2,p1,p2,p3,status,are_count,admissible_count,diagonal_count,"
        "wall_time,seed");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);

  std::ostringstream summary_out;
  write_summary_csv(result.summary, summary_out);
  std::istringstream summary_lines(summary_out.str());
  REQUIRE(std::getline(summary_lines, line));
  CHECK(line ==
        "l2,trials,ok,continuum,skipped,failed,mean_are,mean_admissible,mean_diagonal");
}

TEST_CASE("status names match the csv vocabulary") {
  CHECK(std::string(trial_status_name(TrialStatus::Ok)) == "ok");
  CHECK(std::string(trial_status_name(TrialStatus::Continuum)) == "continuum");
  CHECK(std::string(trial_status_name(TrialStatus::Skipped)) == "skipped");
  CHECK(std::string(trial_status_name(TrialStatus::Failed)) == "failed");
}
