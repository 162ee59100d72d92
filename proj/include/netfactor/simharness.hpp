#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "netfactor/reconstruct.hpp"

namespace netfactor {

// Dimension ranges for random draws. Defaults cover the desk-scale study:
// manifest count p, latent count l and the quadratic-equation dimension l2.
struct DimRanges {
  int l2_min = 0;
  int l2_max = 10;
  int p_min = 2;
  int p_max = 6;
  int l_min = 0;
  int l_max = 16;
};

struct ExperimentConfig {
  int trials = 100;
  DimRanges dims;
  std::uint64_t seed = 1;
  Tolerances tolerances = default_tolerances();
  // Trials whose quadratic equation exceeds this dimension are recorded as
  // skipped instead of attempting a combinatorial subspace walk.
  int max_are_dim = 12;
  Execution mode = Execution::Parallel;
};

// Consistent when p1 + p2 + p3 = p and l = 2 p1 + p2 + l2.
struct TrialDims {
  int p = 0;
  int l = 0;
  int l2 = 0;
  int p1 = 0;  // manifest channels of relative degree 2
  int p2 = 0;  // relative degree 1
  int p3 = 0;  // relative degree 0
};

enum class TrialStatus { Ok, Continuum, Skipped, Failed };

const char* trial_status_name(TrialStatus status);

struct TrialRecord {
  int trial = 0;
  TrialDims dims;
  TrialStatus status = TrialStatus::Ok;
  int are_count = 0;
  int admissible_count = 0;
  int diagonal_count = 0;
  double wall_time = 0.0;  // seconds
  std::uint64_t seed = 0;  // derived per-trial stream seed
  std::string error;       // populated when status == Failed
};

struct StratumSummary {
  int l2 = 0;
  int trials = 0;
  int ok = 0;
  int continuum = 0;
  int skipped = 0;
  int failed = 0;
  double mean_are = 0.0;
  double mean_admissible = 0.0;
  double mean_diagonal = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<StratumSummary> summary;  // ascending l2
};

// Splitmix-style mix of the experiment seed and a trial index; every trial
// owns an independent deterministic stream.
std::uint64_t derive_trial_seed(std::uint64_t seed, int trial);

// Draws a consistent dimension tuple uniformly within the ranges: channel
// relative degrees in {0, 1, 2}, then l2 within range capped by l_max.
TrialDims draw_dims(const DimRanges& ranges, std::mt19937_64& rng);

// Draws a stable, minimal system with c = [I 0], d = 0 and a diagonal
// noise-to-output map at exactly the requested dimensions. Channels carry
// prescribed relative degrees through per-channel rational draws assembled
// chain by chain; remaining entries are standard normal; the spectrum is
// shifted to a 0.1 stability margin; a random latent basis change and a
// random channel relabeling hide the construction. Rejection-samples the
// minimality check; throws GenerationExhausted after 100 attempts.
StateSpace random_system(const TrialDims& dims, std::mt19937_64& rng,
                         const Tolerances& tol = default_tolerances());

// Runs the Monte-Carlo study: per trial, draw dimensions and a system, then
// enumerate the equivalent networks and record the counts. Per-trial errors
// are recorded, never fatal. Trials run concurrently under Parallel mode;
// records land at their trial index, so the output is order-independent.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// One row per trial / one row per l2 stratum; headers always written.
void write_trials_csv(const std::vector<TrialRecord>& records, std::ostream& out);
void write_summary_csv(const std::vector<StratumSummary>& summary, std::ostream& out);

}  // namespace netfactor
