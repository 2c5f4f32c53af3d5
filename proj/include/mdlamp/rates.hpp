#pragma once

#include "mdlamp/sources.hpp"

namespace mdlamp {

/// Empirical distribution of the per-round score classes
/// {mu_min (win), -mu_max (lose), 0}.
struct FrequencyDist {
  double p_win = 0.0;
  double p_lose = 0.0;
  double p_zero = 1.0;
  /// Validates range and normalization (1e-12).
  static FrequencyDist make(double win, double lose, double zero);
};

/// Finite-size analysis parameters of one protocol execution. n is a real
/// number so asymptotic regimes (n ~ 1e20) stay representable.
struct EatParams {
  double n;
  double s_exp;
  double delta_est;
  double eps_s;
  double eps_ea;
  EatParams(double n_, double s_exp_, double delta_est_, double eps_s_,
            double eps_ea_);
};

struct RateResult {
  double eta_opt = 0.0;    // certified bits per round
  double s_t_star = 0.0;   // cut point of the winning linearization
  double hmin_bound = 0.0; // n * eta_opt
  double a_star = 0.0;
  double b_star = 0.0;
  double zeta_star = 0.0;
  bool positive = false;   // negative rates are reported, not errored
};

/// Binary entropy in bits, 0 log 0 = 0. Inputs within 1e-12 of [0,1] are
/// clamped; anything further out is a domain error.
double binary_entropy(double x);

/// Minimal Eberhard violation certified by an MDL value s: s / mu_star.
double alpha_from_smu(double s, const MdlParams& params);

/// End of the nontrivial branch: s_crit = mu_star * (sqrt(2)-1)/2. The
/// entropy bound saturates at 1 from there on.
double s_critical(const MdlParams& params);

/// Certified entropy of one round at violation s >= 0:
/// 1 - h(1/2 + sqrt(s(s+mu_star))/mu_star), clamped to 1 past s_critical.
double single_round_bound(double s, const MdlParams& params);

/// Piecewise version used by the min-tradeoff construction: equals
/// single_round_bound below s_critical and 1 above; continuous.
double g_mu(double s, const MdlParams& params);

struct Linearization {
  double a;  // dg/ds at s_t
  double b;  // g(s_t) - a * s_t
};

/// Tangent of g_mu at s_t, 0 < s_t < s_critical.
Linearization linearize(double s_t, const MdlParams& params);

/// Min-tradeoff function: g_mu below the cut s_t, its tangent above.
double f_min(double s, double s_t, const MdlParams& params);

/// Second-order penalty 2 (log2 9 + a(s_t) mu_max) sqrt(1 - 2 log2(eps_s eps_ea)).
double zeta(double s_t, double eps_s, double eps_ea, const MdlParams& params);

/// Maximizes f_min(s_exp - delta_est, s_t) - zeta(s_t)/sqrt(n) over the cut
/// point (golden-section inside a 200-point grid bracket). hmin_bound is
/// exactly n * eta_opt; there are no hidden terms.
RateResult eta_opt(const EatParams& eat, const MdlParams& params);

/// Hoeffding abort bound for an honest device meeting s_exp on average:
/// exp(-2 n delta^2 / (mu_min + mu_max)^2).
double completeness_bound(double n, double delta_est, const MdlParams& params);

/// Score expectation mu_min * p_win - mu_max * p_lose.
double s_mu_of_freq(const FrequencyDist& f, const MdlParams& params);

}  // namespace mdlamp
