#include "lintslab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "lintslab/counterexamples.hpp"
#include "lintslab/errors.hpp"
#include "lintslab/linalg.hpp"

namespace lintslab {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const auto n = sorted.size();
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BoxplotStats boxplot_stats(std::vector<double> values) {
  if (values.empty()) throw EmptyInputError("boxplot_stats: no values");
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return BoxplotStats{
      .n = static_cast<long long>(values.size()),
      .min = values.front(),
      .q1 = quantile_sorted(values, 0.25),
      .median = quantile_sorted(values, 0.5),
      .q3 = quantile_sorted(values, 0.75),
      .max = values.back(),
      .mean = sum / static_cast<double>(values.size()),
  };
}

std::string policy_name(Policy p) {
  switch (p) {
    case Policy::bayes:
      return "bayes";
    case Policy::freq:
      return "freq";
    case Policy::improved:
      return "improved";
  }
  return "?";
}

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  if (count <= 0) return;
  int workers = threads;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, count);

  if (workers == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::map<int, BoxplotStats> run_example1(const std::vector<int>& dims, int reps,
                                         std::uint64_t base_seed,
                                         const ExperimentConfig& cfg,
                                         std::vector<RawRow>* raw) {
  if (dims.empty()) throw EmptyInputError("run_example1: no dimensions");
  if (reps < 1) throw InvalidParamError("run_example1: reps must be >= 1");
  for (int d : dims)
    if (d < 2) throw InvalidParamError("run_example1: dims must be >= 2");

  const double sigma = 1.0;
  const double tau = cfg.example1_sigma_eq_tau ? sigma : 0.0;

  std::vector<std::vector<double>> values(dims.size(),
                                          std::vector<double>(static_cast<std::size_t>(reps)));
  const int total = static_cast<int>(dims.size()) * reps;
  parallel_for(total, cfg.threads, [&](int idx) {
    const int g = idx / reps;
    const int r = idx % reps;
    const Example1Params params{dims[static_cast<std::size_t>(g)], sigma, tau};
    RandomStream rng(split_seed(base_seed, static_cast<std::uint64_t>(r)));
    const Eigen::VectorXd theta_star =
        sigma * rng.normals(2 * params.block_count);
    const Trajectory traj =
        run_episode(example1_env(params, theta_star), ConstantInflation{1.0}, 1.0, rng);
    const Eigen::VectorXd composite = example1_composite_arm(params);
    double value;
    if (cfg.example1_indicator) {
      value = traj.final_state.mean.dot(composite) > 0.0 ? 1.0 : 0.0;
    } else {
      value = 1.0 / example1_success_prob(traj.final_state, composite, 1.0);
    }
    values[static_cast<std::size_t>(g)][static_cast<std::size_t>(r)] = value;
  });

  if (raw) {
    raw->clear();
    for (std::size_t g = 0; g < dims.size(); ++g)
      for (int r = 0; r < reps; ++r)
        raw->push_back(RawRow{static_cast<double>(dims[g]), r,
                              values[g][static_cast<std::size_t>(r)]});
  }

  std::map<int, BoxplotStats> out;
  for (std::size_t g = 0; g < dims.size(); ++g)
    out[dims[g]] = boxplot_stats(values[g]);
  return out;
}

std::map<double, BoxplotStats> run_example2(Example2Mode mode, const ExperimentConfig& cfg,
                                            std::uint64_t base_seed,
                                            std::vector<RawRow>* raw) {
  struct GridPoint {
    double key;
    int d;
    double mu;
  };
  std::vector<GridPoint> grid;
  if (mode == Example2Mode::vary_d) {
    for (int d : cfg.dims2)
      grid.push_back({static_cast<double>(d), d, cfg.example2_mu});
  } else {
    for (double mu : cfg.mus) grid.push_back({mu, cfg.example2_d, mu});
  }
  if (grid.empty()) throw EmptyInputError("run_example2: empty grid");
  if (cfg.reps < 1) throw InvalidParamError("run_example2: reps must be >= 1");

  // The round-1 state is the same for every replication at a grid point;
  // build it once (at d = 1024 the ambient dimension is 3072).
  std::vector<ArmSet> arm_sets;
  std::vector<PosteriorState> init_states;
  arm_sets.reserve(grid.size());
  init_states.reserve(grid.size());
  for (const auto& point : grid) {
    arm_sets.push_back(example2_action_set(point.d));
    init_states.push_back(posterior_init(3 * point.d, 1.0));
  }

  constexpr int kMaxAttempts = 1000;
  const InflationSchedule schedule = ConstantInflation{1.0};
  std::vector<std::vector<double>> values(grid.size(),
                                          std::vector<double>(static_cast<std::size_t>(cfg.reps)));
  const int total = static_cast<int>(grid.size()) * cfg.reps;
  parallel_for(total, cfg.threads, [&](int idx) {
    const int g = idx / cfg.reps;
    const int r = idx % cfg.reps;
    const auto& point = grid[static_cast<std::size_t>(g)];
    const auto& arms = arm_sets[static_cast<std::size_t>(g)];
    const auto& init = init_states[static_cast<std::size_t>(g)];
    RandomStream rng(split_seed(base_seed, static_cast<std::uint64_t>(r)));

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const Eigen::VectorXd theta_star =
          Eigen::VectorXd::Constant(3 * point.d, point.mu) + rng.normals(3 * point.d);
      const RoundChoice choice = lints_round(init, arms, schedule, rng);
      if (choice.arm_index != 1) continue;  // arm 1 is the unit-norm arm
      const double r1 = theta_star.dot(arms.arms[1]) + rng.normal();
      values[static_cast<std::size_t>(g)][static_cast<std::size_t>(r)] =
          1.0 / example2_continue_prob(r1, point.d);
      return;
    }
    throw RejectionExhaustedError(
        "run_example2: round 1 never chose the unit-norm arm in 1000 attempts");
  });

  if (raw) {
    raw->clear();
    for (std::size_t g = 0; g < grid.size(); ++g)
      for (int r = 0; r < cfg.reps; ++r)
        raw->push_back(RawRow{grid[g].key, r, values[g][static_cast<std::size_t>(r)]});
  }

  std::map<double, BoxplotStats> out;
  for (std::size_t g = 0; g < grid.size(); ++g)
    out[grid[g].key] = boxplot_stats(values[g]);
  return out;
}

namespace {

InflationSchedule schedule_for(Policy p) {
  switch (p) {
    case Policy::bayes:
      return ConstantInflation{1.0};
    case Policy::freq:
      return FreqRhoInflation{};
    case Policy::improved:
      return ThinnessGatedInflation{};
  }
  return ConstantInflation{1.0};
}

}  // namespace

SeriesTable run_policy_compare(const ExperimentConfig& cfg, std::uint64_t base_seed) {
  if (cfg.policies.empty()) throw EmptyInputError("run_policy_compare: no policies");
  if (cfg.compare_reps < 1 || cfg.horizon < 1 || cfg.compare_d < 1 || cfg.compare_arms < 1)
    throw InvalidParamError("run_policy_compare: sizes must be >= 1");

  const int reps = cfg.compare_reps;
  const int horizon = cfg.horizon;
  const int d = cfg.compare_d;
  const int k = cfg.compare_arms;
  const double prior_var = 10.0;
  const double half_width = 1.0 / std::sqrt(static_cast<double>(d));
  const std::size_t num_policies = cfg.policies.size();

  // inst regret and precision thinness per (rep, policy, round); reduced in
  // replication order afterwards so the output is thread-count invariant.
  std::vector<std::vector<std::vector<double>>> inst(
      static_cast<std::size_t>(reps),
      std::vector<std::vector<double>>(num_policies,
                                       std::vector<double>(static_cast<std::size_t>(horizon))));
  auto psi = inst;

  parallel_for(reps, cfg.threads, [&](int r) {
    const std::uint64_t seed_r = split_seed(base_seed, static_cast<std::uint64_t>(r));

    RandomStream theta_stream(split_seed(seed_r, 0));
    const Eigen::VectorXd theta_star =
        std::sqrt(prior_var) * theta_stream.normals(d);
    const std::uint64_t arm_seed = split_seed(seed_r, 1);

    LinearBanditEnv env;
    // Fresh uniform arms each round, regenerated from (arm_seed, t) so every
    // policy sees the identical sequence regardless of its own stream usage.
    env.action_set = [arm_seed, k, d, half_width](int t, RandomStream&) {
      RandomStream arm_stream(split_seed(arm_seed, static_cast<std::uint64_t>(t)));
      std::vector<Eigen::VectorXd> arms(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) {
        Eigen::VectorXd a(d);
        for (int i = 0; i < d; ++i) a[i] = arm_stream.uniform(-half_width, half_width);
        arms[static_cast<std::size_t>(j)] = std::move(a);
      }
      return ArmSet::make(std::move(arms));
    };
    env.theta_star = theta_star;
    env.noise_tau = 1.0;
    env.horizon = horizon;

    for (std::size_t p = 0; p < num_policies; ++p) {
      const Policy policy = cfg.policies[p];
      RandomStream policy_stream(
          split_seed(seed_r, 2 + static_cast<std::uint64_t>(policy)));
      const Trajectory traj =
          run_episode(env, schedule_for(policy), prior_var, policy_stream);
      for (int t = 0; t < horizon; ++t) {
        const auto& rec = traj.records[static_cast<std::size_t>(t)];
        inst[static_cast<std::size_t>(r)][p][static_cast<std::size_t>(t)] = rec.inst_regret;
        psi[static_cast<std::size_t>(r)][p][static_cast<std::size_t>(t)] =
            rec.thinness_of_precision;
      }
    }
  });

  const double psi_gate = 2.0;  // matches the gated schedule's threshold
  SeriesTable table;
  table.rows.reserve(static_cast<std::size_t>(horizon) * num_policies);
  std::vector<double> cum(num_policies, 0.0);
  for (int t = 0; t < horizon; ++t) {
    for (std::size_t p = 0; p < num_policies; ++p) {
      double sum_inst = 0.0, sum_inst2 = 0.0, sum_psi = 0.0;
      int exceed = 0;
      for (int r = 0; r < reps; ++r) {
        const double x = inst[static_cast<std::size_t>(r)][p][static_cast<std::size_t>(t)];
        const double th = psi[static_cast<std::size_t>(r)][p][static_cast<std::size_t>(t)];
        sum_inst += x;
        sum_inst2 += x * x;
        sum_psi += th;
        if (th > psi_gate) ++exceed;
      }
      const double mean_inst = sum_inst / reps;
      double se = 0.0;
      if (reps > 1) {
        const double var =
            std::max(sum_inst2 - reps * mean_inst * mean_inst, 0.0) / (reps - 1);
        se = std::sqrt(var / reps);
      }
      cum[p] += mean_inst;
      table.rows.push_back(SeriesRow{
          .t = t + 1,
          .policy = cfg.policies[p],
          .thinness_mean = sum_psi / reps,
          .inst_regret_mean = mean_inst,
          .cum_regret_mean = cum[p],
          .inst_regret_se = se,
          .psi_exceed_frac = static_cast<double>(exceed) / reps,
      });
    }
  }
  return table;
}

}  // namespace lintslab
