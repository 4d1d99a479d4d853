#include "lintslab/counterexamples.hpp"

#include <cmath>

#include "lintslab/errors.hpp"
#include "lintslab/stats.hpp"

namespace lintslab {

ArmSet example1_action_set(const Example1Params& params, int t) {
  if (params.block_count < 1)
    throw InvalidParamError("example1_action_set: block_count must be >= 1");
  if (t < 1) throw InvalidParamError("example1_action_set: rounds are 1-based");

  const int d = params.block_count;
  const Eigen::Index ambient = 2 * d;
  std::vector<Eigen::VectorXd> arms;

  if (t <= 2 * d) {
    // Singleton phase: coordinate t, one pull each.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(ambient);
    e[t - 1] = 1.0;
    arms.push_back(std::move(e));
  } else if (t <= 3 * d) {
    // Pair phase: block b chooses between its two coordinates.
    const int b = t - 2 * d;  // 1-based block index
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(ambient);
    Eigen::VectorXd e2 = Eigen::VectorXd::Zero(ambient);
    e1[2 * b - 2] = 1.0;
    e2[2 * b - 1] = 1.0;
    arms.push_back(std::move(e1));
    arms.push_back(std::move(e2));
  } else {
    arms.push_back(Eigen::VectorXd::Zero(ambient));
    arms.push_back(example1_composite_arm(params));
  }
  return ArmSet::make(std::move(arms));
}

Eigen::VectorXd example1_composite_arm(const Example1Params& params) {
  const int d = params.block_count;
  const double sign =
      (params.noise_tau * params.noise_tau >= params.prior_sigma * params.prior_sigma)
          ? 1.0
          : -1.0;
  return Eigen::VectorXd::Constant(2 * d, sign / std::sqrt(static_cast<double>(d)));
}

double example1_success_prob(const PosteriorState& state, const Eigen::VectorXd& a,
                             double iota) {
  const double norm = quad_norm(a, state.covariance);
  if (norm < 1e-300)
    throw DegenerateArmError("example1_success_prob: arm has zero posterior norm");
  return norm_cdf(state.mean.dot(a) / (iota * norm));
}

LinearBanditEnv example1_env(const Example1Params& params, Eigen::VectorXd theta_star) {
  LinearBanditEnv env;
  env.action_set = [params](int t, RandomStream&) {
    return example1_action_set(params, t);
  };
  env.theta_star = std::move(theta_star);
  env.noise_tau = params.noise_tau;
  env.horizon = 3 * params.block_count;
  return env;
}

ArmSet example2_action_set(int d) {
  if (d < 1) throw InvalidParamError("example2_action_set: d must be >= 1");
  const Eigen::Index ambient = 3 * static_cast<Eigen::Index>(d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));

  Eigen::VectorXd a_prime = Eigen::VectorXd::Zero(ambient);
  a_prime.head(d).setConstant(-s);  // norm 1

  Eigen::VectorXd a = a_prime;
  a.tail(2 * d).setConstant(s);  // norm sqrt(3), <a, a_prime> = 1

  std::vector<Eigen::VectorXd> arms;
  arms.push_back(Eigen::VectorXd::Zero(ambient));
  arms.push_back(std::move(a_prime));
  arms.push_back(std::move(a));
  return ArmSet::make(std::move(arms));
}

namespace {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1] (QUADPACK qk15).
constexpr double kXgk[8] = {0.9914553711208126, 0.9491079123427585,
                            0.8648644233597691, 0.7415311855993944,
                            0.5860872354676911, 0.4058451513773972,
                            0.2077849550078985, 0.0};
constexpr double kWgk[8] = {0.0229353220105292, 0.0630920926299785,
                            0.1047900103222502, 0.1406532597155259,
                            0.1690047266392679, 0.1903505780647854,
                            0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

template <typename F>
void gk15(const F& f, double a, double b, double* kronrod, double* gauss) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    if (kXgk[i] == 0.0) {
      const double fc = f(mid);
      resk += kWgk[i] * fc;
      resg += kWg[3] * fc;
    } else {
      const double fv = f(mid - half * kXgk[i]) + f(mid + half * kXgk[i]);
      resk += kWgk[i] * fv;
      if (i % 2 == 1) resg += kWg[i / 2] * fv;  // odd indices are Gauss nodes
    }
  }
  *kronrod = resk * half;
  *gauss = resg * half;
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth) {
  double k, g;
  gk15(f, a, b, &k, &g);
  if (std::fabs(k - g) <= tol || depth >= 48) return k;
  const double mid = 0.5 * (a + b);
  return adaptive_gk(f, a, mid, 0.5 * tol, depth + 1) +
         adaptive_gk(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

double bivariate_orthant_neg(double m1, double m2, double v1, double v2, double c) {
  if (!(v1 > 0.0) || !(v2 > 0.0))
    throw InvalidParamError("bivariate_orthant_neg: variances must be > 0");
  if (c * c >= v1 * v2)
    throw InvalidCovarianceError("bivariate_orthant_neg: |correlation| >= 1");

  // Condition on X = m1 + sqrt(v1) u: the inner factor is the conditional
  // Gaussian CDF of Y at zero, the outer is the standard normal density.
  const double k = c / std::sqrt(v1);
  const double s = std::sqrt(v2 - c * c / v1);
  const double hi = -m1 / std::sqrt(v1);

  constexpr double kCut = 8.5;  // Phi(-8.5) ~ 9.5e-18, far below the tolerance
  if (hi <= -kCut) return 0.0;

  const auto f = [k, s, m2](double u) {
    return norm_pdf(u) * norm_cdf(-(m2 + k * u) / s);
  };
  return adaptive_gk(f, -kCut, std::min(hi, kCut), 1e-10, 0);
}

double example2_continue_prob(double r1, int d) {
  if (d < 1) throw InvalidParamError("example2_continue_prob: d must be >= 1");
  // Round-2 posterior after one pull of the unit arm with reward r1: the two
  // candidate inner products are N(r1/2, 1/2) and N(r1/2, 5/2), covariance 1/2.
  return 1.0 - bivariate_orthant_neg(0.5 * r1, 0.5 * r1, 0.5, 2.5, 0.5);
}

double selection_beta() {
  return 0.5641895835477563;  // 1/sqrt(pi)
}

double bias_closed_form(double sigma, double tau) {
  const double s2 = sigma * sigma, t2 = tau * tau;
  return (s2 - t2) * selection_beta() / (6.0 * std::sqrt(s2 + t2 + 2.0));
}

MisperceptionConstants misperception_constants(double sigma, double tau) {
  MisperceptionConstants out;
  out.p0 = 0.5 * (1.0 - norm_cdf(1.0));
  out.c1 = 0.5 * std::fabs(bias_closed_form(sigma, tau));
  return out;
}

std::vector<double> simulate_block_bias(double sigma, double tau, int blocks,
                                        RandomStream& rng) {
  if (blocks < 1) throw InvalidParamError("simulate_block_bias: blocks must be >= 1");
  const Example1Params params{.block_count = 1, .prior_sigma = sigma, .noise_tau = tau};
  const InflationSchedule schedule = ConstantInflation{1.0};

  std::vector<double> values;
  values.reserve(blocks);
  for (int i = 0; i < blocks; ++i) {
    Eigen::VectorXd theta_star = sigma * rng.normals(2);
    const Trajectory traj =
        run_episode(example1_env(params, std::move(theta_star)), schedule, 1.0, rng);
    values.push_back(traj.final_state.mean.sum());  // <ones, theta_hat_4>
  }
  return values;
}

}  // namespace lintslab
