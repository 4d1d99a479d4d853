// Acceptance gate: one self-contained check per release criterion, each
// printing a single PASS/FAIL line with the measured quantities. Run with no
// arguments for the full gate or with --only N for one criterion.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lintslab/cli.hpp"
#include "lintslab/counterexamples.hpp"
#include "lintslab/experiments.hpp"
#include "lintslab/linalg.hpp"
#include "lintslab/posterior.hpp"
#include "lintslab/rng.hpp"
#include "lintslab/stats.hpp"
#include "lintslab/theory.hpp"

using namespace lintslab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBaseSeed = 42;
constexpr double kPhiMinusOne = 0.15865525393145707;

struct Result {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string name;
  std::function<Result()> run;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  long long n = 0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  double sum = 0.0, sum2 = 0.0;
  for (double x : xs) {
    sum += x;
    sum2 += x * x;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  const double var = std::max(sum2 / n - mean * mean, 0.0);
  return MeanSe{mean, std::sqrt(var / n), static_cast<long long>(xs.size())};
}

// 1: block-level selection bias matches its closed form at one million blocks
// per setting, and the closed form itself hits the reference value.
Result criterion_bias_closed_form() {
  const double settings[3][2] = {{1.0, 0.0}, {0.0, 1.0}, {2.0, 1.0}};
  const int blocks = 1000000;
  bool pass = std::fabs(bias_closed_form(1.0, 0.0) - 0.0542891) < 5e-7;
  std::ostringstream detail;
  for (int i = 0; i < 3; ++i) {
    const double sigma = settings[i][0], tau = settings[i][1];
    RandomStream rng(split_seed(kBaseSeed, 2020 + static_cast<std::uint64_t>(i)));
    const MeanSe ms = mean_se(simulate_block_bias(sigma, tau, blocks, rng));
    const double target = bias_closed_form(sigma, tau);
    const bool ok = std::fabs(ms.mean - target) <= 3.0 * ms.se;
    pass = pass && ok;
    detail << fmt("(s=%g,t=%g): %.6f vs %.6f +-%.6f%s ", sigma, tau, ms.mean, target,
                  3.0 * ms.se, ok ? "" : " MISS");
  }
  return {pass, detail.str()};
}

// 2: the selection constant beta = E[max of two standard normals].
Result criterion_beta() {
  const int n = 10000000;
  RandomStream rng(split_seed(kBaseSeed, 2100));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::max(rng.normal(), rng.normal());
  const double mean = sum / n;
  const double err = std::fabs(mean - selection_beta());
  return {err <= 5e-4, fmt("estimate %.7f vs %.7f, |err| %.2e (cap 5e-4)", mean,
                           selection_beta(), err)};
}

// 3: the conditional-expectation decomposition for all three test functions,
// with the exact matched-estimator identity on the linear shape.
Result criterion_decomposition() {
  const GShape shapes[] = {GShape::one, GShape::linear,
                           GShape::positive_part_indicator};
  bool pass = true;
  std::ostringstream detail;
  for (int i = 0; i < 3; ++i) {
    RandomStream rng(split_seed(kBaseSeed, 2200 + static_cast<std::uint64_t>(i)));
    const VerificationReport rep =
        mc_bias_decomposition({1.0, 2.0}, shapes[i], 1000000, rng);
    pass = pass && rep.pass;
    detail << fmt("%s: %.2f se%s ", rep.name.c_str(), rep.estimate,
                  rep.pass ? "" : " FAIL");
  }
  return {pass, detail.str()};
}

// 4: failure-streak growth across d: strictly increasing medians of 1/p and
// at least a tenfold gap between d = 64 and d = 8.
Result criterion_streak_trend() {
  ExperimentConfig cfg;
  cfg.threads = 1;
  const std::vector<int> dims{2, 4, 8, 16, 32, 64};
  const auto stats = run_example1(dims, 50, kBaseSeed, cfg);
  bool increasing = true;
  std::ostringstream detail;
  detail << "medians ";
  double prev = 0.0;
  for (int d : dims) {
    const double med = stats.at(d).median;
    if (med <= prev) increasing = false;
    prev = med;
    detail << fmt("%g ", med);
  }
  const double ratio = stats.at(64).median / stats.at(8).median;
  detail << fmt("| 64/8 ratio %.3f (need >= 10, strict increase %s)", ratio,
                increasing ? "yes" : "no");
  return {increasing && ratio >= 10.0, detail.str()};
}

// 5: round one of the fixed-arm environment picks the unit arm 1/4 of the time.
Result criterion_round1_law() {
  const int d = 4, n = 100000;
  const ArmSet arms = example2_action_set(d);
  const PosteriorState init = posterior_init(3 * d, 1.0);
  RandomStream rng(split_seed(kBaseSeed, 2400));
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (lints_round(init, arms, ConstantInflation{1.0}, rng).arm_index == 1) ++hits;
  const double freq = static_cast<double>(hits) / n;
  const double se = std::sqrt(0.25 * 0.75 / n);
  return {std::fabs(freq - 0.25) <= 3.0 * se,
          fmt("frequency %.5f vs 0.25 +-%.5f (n=%d)", freq, 3.0 * se, n)};
}

// 6: the round-2 posterior the continuation probability is computed from.
Result criterion_round2_marginals() {
  const int d = 2;
  const ArmSet arms = example2_action_set(d);
  bool pass = true;
  std::ostringstream detail;

  // (a) exact marginal parameters after one pull of the unit arm
  double worst = 0.0;
  for (double r1 : {0.0, -0.7, 1.3}) {
    PosteriorState s = posterior_init(3 * d, 1.0);
    s = posterior_update(s, arms.arms[1], r1);
    const Eigen::MatrixXd& cov = s.covariance.matrix();
    const double gaps[5] = {
        std::fabs(s.mean.dot(arms.arms[1]) - r1 / 2.0),
        std::fabs(s.mean.dot(arms.arms[2]) - r1 / 2.0),
        std::fabs(arms.arms[1].dot(cov * arms.arms[1]) - 0.5),
        std::fabs(arms.arms[2].dot(cov * arms.arms[2]) - 2.5),
        std::fabs(arms.arms[1].dot(cov * arms.arms[2]) - 0.5),
    };
    for (double g : gaps) worst = std::max(worst, g);
  }
  pass = pass && worst <= 1e-10;
  detail << fmt("marginal gap %.1e; ", worst);

  // (b) quadrature vs resampling the same posterior
  {
    const double r1 = -0.3;
    PosteriorState s = posterior_init(3 * d, 1.0);
    s = posterior_update(s, arms.arms[1], r1);
    const double p = example2_continue_prob(r1, d);
    const int n = 100000;
    RandomStream rng(split_seed(kBaseSeed, 2500));
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd theta = posterior_sample(s, 1.0, rng);
      if (std::max(theta.dot(arms.arms[1]), theta.dot(arms.arms[2])) > 0.0) ++hits;
    }
    const double freq = static_cast<double>(hits) / n;
    const double se = std::sqrt(p * (1.0 - p) / n);
    const bool ok = std::fabs(freq - p) <= 3.0 * se;
    pass = pass && ok;
    detail << fmt("MC %.4f vs %.4f +-%.4f%s; ", freq, p, 3.0 * se, ok ? "" : " MISS");
  }

  // (c) strict decrease along the d grid at mu = 0.1 (representative reward)
  double prev = 2.0;
  bool decreasing = true;
  detail << "cp(d) ";
  for (int dd : {16, 64, 256}) {
    const double cp = example2_continue_prob(-0.1 * std::sqrt(double(dd)), dd);
    if (cp >= prev) decreasing = false;
    prev = cp;
    detail << fmt("%.4f ", cp);
  }
  pass = pass && decreasing;
  return {pass, detail.str()};
}

// 7: the orthant quadrature against the arcsine law and against plain MC on
// twenty random shifted settings.
Result criterion_orthant() {
  constexpr double kPi = 3.14159265358979323846;
  bool pass = true;
  double worst_grid = 0.0;
  for (double rho = -0.9; rho <= 0.9 + 1e-12; rho += 0.2) {
    const double exact = 0.25 + std::asin(rho) / (2.0 * kPi);
    worst_grid =
        std::max(worst_grid, std::fabs(bivariate_orthant_neg(0, 0, 1, 1, rho) - exact));
  }
  pass = pass && worst_grid <= 1e-8;

  RandomStream rng(split_seed(kBaseSeed, 2700));
  const int n = 1000000;
  int misses = 0;
  double worst_sigmas = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double m1 = rng.uniform(-2.0, 2.0);
    const double m2 = rng.uniform(-2.0, 2.0);
    const double v1 = rng.uniform(0.25, 4.0);
    const double v2 = rng.uniform(0.25, 4.0);
    const double rho = rng.uniform(-0.95, 0.95);
    const double c = rho * std::sqrt(v1 * v2);
    const double p = bivariate_orthant_neg(m1, m2, v1, v2, c);

    const double l21 = c / std::sqrt(v1);
    const double l22 = std::sqrt(v2 - c * c / v1);
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const double z1 = rng.normal(), z2 = rng.normal();
      const double x = m1 + std::sqrt(v1) * z1;
      const double y = m2 + l21 * z1 + l22 * z2;
      if (x <= 0.0 && y <= 0.0) ++hits;
    }
    const double freq = static_cast<double>(hits) / n;
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
    const double gap_se = std::fabs(freq - p) / se;
    worst_sigmas = std::max(worst_sigmas, gap_se);
    if (std::fabs(freq - p) > 3.0 * se + 1e-9) ++misses;
  }
  pass = pass && misses == 0;
  return {pass, fmt("grid gap %.1e (cap 1e-8); %d/20 MC misses, worst %.2f se",
                    worst_grid, misses, worst_sigmas)};
}

// 8: the optimism floor over rejection-generated well-posed scenarios.
Result criterion_optimism() {
  bool pass = true;
  std::ostringstream detail;
  for (int d : {5, 20}) {
    RandomStream rng(split_seed(kBaseSeed, 2800 + static_cast<std::uint64_t>(d)));
    const VerificationReport rep = mc_optimism_rate(d, TheoryParams{}, 10000, rng);
    pass = pass && rep.pass && rep.estimate >= kPhiMinusOne - 1e-9;
    detail << fmt("d=%d min %.6f%s ", d, rep.estimate, rep.pass ? "" : " FAIL");
  }
  detail << fmt("(floor %.6f)", kPhiMinusOne);
  return {pass, detail.str()};
}

ExperimentConfig compare_config() {
  ExperimentConfig cfg;
  cfg.compare_d = 10;
  cfg.compare_arms = 20;
  cfg.horizon = 500;
  cfg.compare_reps = 20;
  cfg.threads = 1;
  return cfg;
}

// 9: thinness of the design matrix settles under the gate for every policy.
Result criterion_thinness_settles() {
  const ExperimentConfig cfg = compare_config();
  const SeriesTable table = run_policy_compare(cfg, 7);
  const std::size_t num_policies = cfg.policies.size();
  bool pass = true;
  std::ostringstream detail;
  for (std::size_t p = 0; p < num_policies; ++p) {
    double ok_mass = 0.0;
    int count = 0;
    for (const SeriesRow& row : table.rows) {
      if (row.policy != cfg.policies[p] || row.t <= 100) continue;
      ok_mass += 1.0 - row.psi_exceed_frac;
      ++count;
    }
    const double frac = ok_mass / count;
    pass = pass && frac >= 0.95;
    detail << fmt("%s %.4f%s ", policy_name(cfg.policies[p]).c_str(), frac,
                  frac >= 0.95 ? "" : " LOW");
  }
  detail << "(fraction of rounds t>100 with psi <= 2, need >= 0.95)";
  return {pass, detail.str()};
}

// 10: cumulative-regret ordering of the three schedules at the horizon.
Result criterion_regret_ordering() {
  const ExperimentConfig cfg = compare_config();
  const SeriesTable table = run_policy_compare(cfg, 7);
  double final_cum[3] = {0, 0, 0};
  for (const SeriesRow& row : table.rows)
    if (row.t == cfg.horizon) final_cum[static_cast<int>(row.policy)] = row.cum_regret_mean;
  const double bayes = final_cum[0], freq = final_cum[1], improved = final_cum[2];
  const bool freq_worst = freq > improved;
  const bool improved_closer = std::fabs(improved - bayes) < std::fabs(freq - bayes);
  return {freq_worst && improved_closer,
          fmt("cum regret at T: bayes %.1f, freq %.1f, improved %.1f", bayes, freq,
              improved)};
}

// 11: cube-direction tail bound and the quadratic-form mean identity.
Result criterion_tail_bounds() {
  bool pass = true;
  std::ostringstream detail;
  const int n = 1000000;

  RandomStream r1(split_seed(kBaseSeed, 2900));
  const VerificationReport cube16 = mc_cube_tail(16, 0.1, n, r1);
  RandomStream r2(split_seed(kBaseSeed, 2901));
  const VerificationReport cube64 = mc_cube_tail(64, 0.01, n, r2);
  pass = pass && cube16.pass && cube64.pass;
  detail << fmt("cube d=16 %.2e<=%.2e%s, d=64 %.2e<=%.2e%s; ", cube16.estimate,
                cube16.target, cube16.pass ? "" : " FAIL", cube64.estimate,
                cube64.target, cube64.pass ? "" : " FAIL");

  int tag = 0;
  for (int d : {16, 36}) {
    RandomStream rng(split_seed(kBaseSeed, 2910 + static_cast<std::uint64_t>(tag++)));
    const VerificationReport ident = mc_quad_lower_tail(PsdMatrix::identity(d), n, rng);

    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    const PsdMatrix random_psd = PsdMatrix::symmetrized(
        g * g.transpose() / static_cast<double>(d) +
        0.5 * Eigen::MatrixXd::Identity(d, d));
    const VerificationReport rand_rep = mc_quad_lower_tail(random_psd, n, rng);

    pass = pass && ident.pass && rand_rep.pass;
    detail << fmt("quad d=%d id%s rand%s; ", d, ident.pass ? " ok" : " FAIL",
                  rand_rep.pass ? " ok" : " FAIL");
  }
  return {pass, detail.str()};
}

// 12: the rank-one covariance identity at scale plus bytewise determinism of
// the full command-line pipeline.
Result criterion_numerical_core() {
  RandomStream rng(split_seed(kBaseSeed, 3000));
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform(0.0, 8.0));
    PosteriorState s = posterior_init(d, std::exp(rng.uniform(-1.5, 1.5)));
    const int rounds = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
    for (int k = 0; k < rounds; ++k)
      s = posterior_update(s, rng.normals(d), rng.normal());
    const Eigen::MatrixXd direct = s.precision.matrix().inverse();
    worst = std::max(worst, (s.covariance.matrix() - direct).cwiseAbs().maxCoeff());
  }
  bool pass = worst <= 1e-8;

  const fs::path base = fs::temp_directory_path();
  const fs::path out_a = base / "lintslab_acc12_a";
  const fs::path out_b = base / "lintslab_acc12_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  const std::vector<std::string> args{"example1", "--dims", "2,4,8,16,32,64",
                                      "--reps",   "50",     "--seed",
                                      "42",       "--threads", "1"};
  auto run_into = [&args](const fs::path& dir) {
    std::vector<std::string> full = args;
    full.push_back("--out");
    full.push_back(dir.string());
    return dispatch(full);
  };
  const int rc_a = run_into(out_a);
  const int rc_b = run_into(out_b);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  const std::string csv_a = slurp(out_a / "example1.csv");
  const std::string csv_b = slurp(out_b / "example1.csv");
  const bool identical = rc_a == 0 && rc_b == 0 && !csv_a.empty() && csv_a == csv_b;
  pass = pass && identical;
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  return {pass, fmt("worst inverse gap %.1e (cap 1e-8); repeated runs %s", worst,
                    identical ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "bias closed form vs MC", criterion_bias_closed_form},
      {2, "selection constant beta", criterion_beta},
      {3, "bias decomposition", criterion_decomposition},
      {4, "streak growth across d", criterion_streak_trend},
      {5, "round-1 quarter law", criterion_round1_law},
      {6, "round-2 marginals + continuation", criterion_round2_marginals},
      {7, "orthant quadrature", criterion_orthant},
      {8, "optimism floor", criterion_optimism},
      {9, "thinness settles", criterion_thinness_settles},
      {10, "regret ordering", criterion_regret_ordering},
      {11, "tail bounds", criterion_tail_bounds},
      {12, "numerical core + determinism", criterion_numerical_core},
  };

  // runtime caps stated alongside the statistical tolerances
  const double time_caps[13] = {0, 60, 30, 0, 300, 0, 0, 0, 0, 0, 0, 0, 0};

  bool all_pass = true;
  bool ran_any = false;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ran_any = true;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double cap = time_caps[c.id];
    if (cap > 0.0 && secs > cap) {
      r.pass = false;
      r.detail += fmt(" [exceeded %.0fs budget]", cap);
    }
    std::printf("%s %2d %-32s %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), r.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && r.pass;
  }
  if (!ran_any) {
    std::fprintf(stderr, "no criterion with id %d\n", only);
    return 2;
  }
  return all_pass ? 0 : 1;
}
