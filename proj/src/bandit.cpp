#include "lintslab/bandit.hpp"

#include <cmath>
#include <string>

#include "lintslab/errors.hpp"
#include "lintslab/linalg.hpp"

namespace lintslab {

ArmSet ArmSet::make(std::vector<Eigen::VectorXd> arms) {
  if (arms.empty()) throw EmptyInputError("ArmSet: no arms");
  const Eigen::Index d = arms.front().size();
  double bound = 0.0;
  for (const auto& a : arms) {
    if (a.size() != d)
      throw DimensionMismatchError("ArmSet: arms of mixed dimension");
    bound = std::max(bound, a.norm());
  }
  return ArmSet{std::move(arms), bound};
}

namespace {

double freq_rho(const FreqRhoInflation& sched, const PosteriorState& state) {
  if (!(sched.delta > 0.0 && sched.delta < 1.0))
    throw InvalidParamError("inflation_value: delta must be in (0,1)");
  if (!(sched.prior_scale > 0.0))
    throw InvalidParamError("inflation_value: prior_scale must be > 0");

  const double d = static_cast<double>(state.dim);
  // -1/2 log det(Sigma_t) - 1/2 log det(prior_scale I) - log delta; the
  // covariance log-determinant reads off the state's Cholesky diagonal.
  const double bracket = -0.5 * cholesky_logdet(state.chol) -
                         0.5 * d * std::log(sched.prior_scale) -
                         std::log(sched.delta);
  if (!(bracket > 0.0))
    throw NonFiniteRhoError(
        "inflation_value: log argument <= 0 (posterior covariance exceeds the "
        "prior reference)");
  return std::sqrt(2.0 * bracket) + std::sqrt(d);
}

}  // namespace

double inflation_value(const InflationSchedule& schedule, const PosteriorState& state) {
  return std::visit(
      [&state](const auto& sched) -> double {
        using T = std::decay_t<decltype(sched)>;
        if constexpr (std::is_same_v<T, ConstantInflation>) {
          if (!(sched.iota > 0.0))
            throw InvalidParamError("inflation_value: iota must be > 0");
          return sched.iota;
        } else if constexpr (std::is_same_v<T, FreqRhoInflation>) {
          return freq_rho(sched, state);
        } else {
          if (!(sched.base_iota > 0.0))
            throw InvalidParamError("inflation_value: base_iota must be > 0");
          // The gate reads thinness off the precision matrix (1/lambda) I + sum a a^T.
          return thinness(state.precision) <= sched.psi_threshold
                     ? sched.base_iota
                     : freq_rho(sched.fallback, state);
        }
      },
      schedule);
}

Eigen::Index select_arm(const Eigen::VectorXd& theta_tilde, const ArmSet& arm_set) {
  if (arm_set.arms.empty()) throw EmptyInputError("select_arm: no arms");
  Eigen::Index best = 0;
  double best_value = arm_set.arms[0].dot(theta_tilde);
  for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(arm_set.arms.size()); ++i) {
    if (arm_set.arms[i].size() != theta_tilde.size())
      throw DimensionMismatchError("select_arm: arm/sample dimension mismatch");
    const double value = arm_set.arms[i].dot(theta_tilde);
    if (value > best_value) {  // strict: ties stay with the lowest index
      best = i;
      best_value = value;
    }
  }
  if (arm_set.arms[0].size() != theta_tilde.size())
    throw DimensionMismatchError("select_arm: arm/sample dimension mismatch");
  return best;
}

RoundChoice lints_round(const PosteriorState& state, const ArmSet& arm_set,
                        const InflationSchedule& schedule, RandomStream& rng) {
  const double iota = inflation_value(schedule, state);
  Eigen::VectorXd theta_tilde = posterior_sample(state, iota, rng);
  const Eigen::Index index = select_arm(theta_tilde, arm_set);
  return RoundChoice{index, std::move(theta_tilde), iota};
}

double Trajectory::cumulative_regret() const {
  double total = 0.0;
  for (const auto& r : records) total += r.inst_regret;
  return total;
}

Trajectory run_episode(const LinearBanditEnv& env, const InflationSchedule& schedule,
                       double lambda, RandomStream& rng) {
  if (env.horizon < 1) throw InvalidParamError("run_episode: horizon must be >= 1");

  PosteriorState state = posterior_init(env.theta_star.size(), lambda);
  Trajectory traj;
  traj.records.reserve(env.horizon);

  for (int t = 1; t <= env.horizon; ++t) {
    const ArmSet arms = env.action_set(t, rng);
    RoundChoice choice = lints_round(state, arms, schedule, rng);
    const Eigen::VectorXd& chosen = arms.arms[choice.arm_index];

    const double mean_reward = chosen.dot(env.theta_star);
    // tau = 0 still burns one normal so the stream layout does not depend on
    // the noise scale.
    const double reward = mean_reward + env.noise_tau * rng.normal();

    double best = arms.arms[0].dot(env.theta_star);
    for (const auto& a : arms.arms) best = std::max(best, a.dot(env.theta_star));

    state = posterior_update(state, chosen, reward);

    traj.records.push_back(RoundRecord{
        .t = t,
        .arm_index = choice.arm_index,
        .reward = reward,
        .inst_regret = best - mean_reward,
        .iota_used = choice.iota_used,
        .thinness_of_precision = thinness(state.precision),
        .chol_clamped = state.chol_clamped,
    });
  }
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace lintslab
