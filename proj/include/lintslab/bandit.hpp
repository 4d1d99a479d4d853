#pragma once

#include <functional>
#include <variant>
#include <vector>
#include <Eigen/Dense>

#include "lintslab/posterior.hpp"
#include "lintslab/rng.hpp"

namespace lintslab {

// Finite action set for one round. `bound` is the largest arm l2 norm,
// computed on construction.
struct ArmSet {
  std::vector<Eigen::VectorXd> arms;
  double bound = 0.0;

  // Throws EmptyInputError / DimensionMismatchError on malformed input.
  static ArmSet make(std::vector<Eigen::VectorXd> arms);
};

// Posterior-inflation schedules. The sampler uses N(mean, iota^2 Sigma_t)
// with iota supplied per round by one of these.

struct ConstantInflation {
  double iota = 1.0;
};

// Frequentist confidence radius built from the posterior covariance:
//   rho_t = sqrt(2 * (-1/2 log det Sigma_t - 1/2 log det(prior_scale I) - log delta)) + sqrt(d).
struct FreqRhoInflation {
  double delta = 1e-4;
  double prior_scale = 0.1;
};

// base_iota while the precision matrix stays thin-free (psi <= psi_threshold),
// otherwise fall back to the frequentist radius.
struct ThinnessGatedInflation {
  double base_iota = 5.0;
  double psi_threshold = 2.0;
  FreqRhoInflation fallback;
};

using InflationSchedule =
    std::variant<ConstantInflation, FreqRhoInflation, ThinnessGatedInflation>;

// Evaluates the schedule against the current posterior. Throws
// NonFiniteRhoError if the frequentist radius' log argument is <= 0 and
// InvalidParamError for non-positive constants.
double inflation_value(const InflationSchedule& schedule, const PosteriorState& state);

// Index of the arm maximizing <arm, theta_tilde>; ties resolve to the lowest
// index. Throws EmptyInputError / DimensionMismatchError.
Eigen::Index select_arm(const Eigen::VectorXd& theta_tilde, const ArmSet& arm_set);

struct RoundChoice {
  Eigen::Index arm_index = 0;
  Eigen::VectorXd theta_tilde;
  double iota_used = 1.0;
};

// One Thompson step: evaluate the schedule, draw theta_tilde (consuming
// exactly dim standard normals from rng), pick the argmax arm. Does not
// advance the posterior; the caller owns the reward observation.
RoundChoice lints_round(const PosteriorState& state, const ArmSet& arm_set,
                        const InflationSchedule& schedule, RandomStream& rng);

// Environment: the action-set process, the true parameter, and the true noise
// scale (which the posterior update deliberately ignores; it always assumes
// unit observation noise).
struct LinearBanditEnv {
  std::function<ArmSet(int t, RandomStream& rng)> action_set;
  Eigen::VectorXd theta_star;
  double noise_tau = 0.0;
  int horizon = 0;
};

struct RoundRecord {
  int t = 0;
  Eigen::Index arm_index = 0;
  double reward = 0.0;
  double inst_regret = 0.0;        // max_a <theta*, a> - <theta*, chosen>
  double iota_used = 1.0;
  double thinness_of_precision = 1.0;  // psi of the post-update precision
  bool chol_clamped = false;       // numerical event in the post-update factor
};

struct Trajectory {
  std::vector<RoundRecord> records;
  PosteriorState final_state;

  double cumulative_regret() const;
};

// Runs LinTS for env.horizon rounds: sample, act, observe
// <theta*, arm> + noise_tau * N(0,1), update. Per round the stream is
// consumed by exactly dim normals for the sample plus one for the noise.
Trajectory run_episode(const LinearBanditEnv& env, const InflationSchedule& schedule,
                       double lambda, RandomStream& rng);

}  // namespace lintslab
