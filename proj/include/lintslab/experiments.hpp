#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lintslab/bandit.hpp"

namespace lintslab {

struct BoxplotStats {
  long long n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

// Five-number summary plus mean; quartiles by linear interpolation of the
// order statistics at positions (n-1)*q. Throws EmptyInputError.
BoxplotStats boxplot_stats(std::vector<double> values);

enum class Policy { bayes, freq, improved };

std::string policy_name(Policy p);

// Per-(round, policy) aggregate across replications.
struct SeriesRow {
  int t = 0;
  Policy policy = Policy::bayes;
  double thinness_mean = 0;
  double inst_regret_mean = 0;
  double cum_regret_mean = 0;  // prefix sum of inst_regret_mean
  double inst_regret_se = 0;
  double psi_exceed_frac = 0;  // fraction of replications with psi > the gate
};

struct SeriesTable {
  std::vector<SeriesRow> rows;  // ordered by (t, policy)
};

struct ExperimentConfig {
  std::vector<int> dims{2, 4, 8, 16, 32, 64};  // example1 grid
  std::vector<int> dims2{16, 64, 256, 1024};   // example2 vary-d grid
  std::vector<double> mus{0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                          0.6, 0.7, 0.8, 0.9, 1.0};  // example2 vary-mu grid
  int example2_d = 200;     // fixed d for vary-mu
  double example2_mu = 0.1; // fixed mu for vary-d
  int reps = 50;
  int compare_d = 50;
  int compare_arms = 100;
  int horizon = 1000;
  int compare_reps = 20;
  std::vector<Policy> policies{Policy::bayes, Policy::freq, Policy::improved};
  std::uint64_t seed = 42;
  int threads = 0;          // 0 = hardware concurrency
  bool example1_sigma_eq_tau = false;  // diagnostic: run with tau = sigma
  bool example1_indicator = false;     // report 1{<mean, ones> > 0} instead of 1/p
};

// Runs `count` jobs (by index) on up to `threads` workers; each job writes
// only its own slot, so results are identical for any thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

// One per-replication datum, kept in (grid point, replication) order so the
// raw CSVs are reproducible byte for byte.
struct RawRow {
  double key = 0.0;  // grid value (dim, d, or mu)
  int rep = 0;
  double value = 0.0;
};

// Forced-exploration failure-streak experiment: for each d, `reps`
// replications of 3d rounds, then 1/p for the composite arm. Replication r
// uses stream seed split_seed(base_seed, r) at every grid point, so grid
// points are paired through common random numbers.
std::map<int, BoxplotStats> run_example1(const std::vector<int>& dims, int reps,
                                         std::uint64_t base_seed,
                                         const ExperimentConfig& cfg = {},
                                         std::vector<RawRow>* raw = nullptr);

// Mean-shift experiment. vary_d: grid of dimensions at fixed mu; vary_mu:
// grid of prior shifts at fixed d. Each replication rejection-samples round 1
// until the unit-norm arm is chosen (cap 1000), observes r1 with unit noise,
// and records 1/example2_continue_prob(r1, d). Map key is the grid value.
// Replication seeding as in run_example1.
enum class Example2Mode { vary_d, vary_mu };
std::map<double, BoxplotStats> run_example2(Example2Mode mode, const ExperimentConfig& cfg,
                                            std::uint64_t base_seed,
                                            std::vector<RawRow>* raw = nullptr);

// Three-policy comparison on fresh uniform-cube action sets, shared Theta*
// and shared per-round arm draws across policies within each replication.
SeriesTable run_policy_compare(const ExperimentConfig& cfg, std::uint64_t base_seed);

}  // namespace lintslab
