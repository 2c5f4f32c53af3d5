#include "mdlamp/rates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdlamp {

namespace {

constexpr double kClampTol = 1e-12;

void require_positive_mu_star(const MdlParams& params, const char* who) {
  if (!(params.mu_star > 0.0))
    throw std::domain_error(std::string(who) + ": requires mu_min > 0");
}

}  // namespace

FrequencyDist FrequencyDist::make(double win, double lose, double zero) {
  FrequencyDist f{win, lose, zero};
  for (double v : {win, lose, zero})
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("FrequencyDist: entries must lie in [0, 1]");
  if (std::abs(win + lose + zero - 1.0) > 1e-12)
    throw std::invalid_argument("FrequencyDist: not normalized");
  return f;
}

EatParams::EatParams(double n_, double s_exp_, double delta_est_,
                     double eps_s_, double eps_ea_)
    : n(n_), s_exp(s_exp_), delta_est(delta_est_), eps_s(eps_s_),
      eps_ea(eps_ea_) {
  if (!(n >= 1.0)) throw std::invalid_argument("EatParams: n must be >= 1");
  if (!(delta_est > 0.0 && delta_est < s_exp))
    throw std::invalid_argument("EatParams: need 0 < delta_est < s_exp");
  if (!(eps_s > 0.0 && eps_s < 1.0) || !(eps_ea > 0.0 && eps_ea < 1.0))
    throw std::invalid_argument("EatParams: eps_s, eps_ea must lie in (0, 1)");
}

double binary_entropy(double x) {
  if (!(x >= -kClampTol && x <= 1.0 + kClampTol))
    throw std::domain_error("binary_entropy: argument outside [0, 1]");
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double alpha_from_smu(double s, const MdlParams& params) {
  require_positive_mu_star(params, "alpha_from_smu");
  return s / params.mu_star;
}

double s_critical(const MdlParams& params) {
  return params.mu_star * (std::numbers::sqrt2 - 1.0) / 2.0;
}

double single_round_bound(double s, const MdlParams& params) {
  if (s < 0.0) throw std::domain_error("single_round_bound: s must be >= 0");
  require_positive_mu_star(params, "single_round_bound");
  double u = 0.5 + std::sqrt(s * (s + params.mu_star)) / params.mu_star;
  return 1.0 - binary_entropy(std::min(u, 1.0));
}

double g_mu(double s, const MdlParams& params) {
  require_positive_mu_star(params, "g_mu");
  if (s / params.mu_star >= (std::numbers::sqrt2 - 1.0) / 2.0) return 1.0;
  return single_round_bound(s, params);
}

Linearization linearize(double s_t, const MdlParams& params) {
  require_positive_mu_star(params, "linearize");
  if (!(s_t > 0.0 && s_t < s_critical(params)))
    throw std::domain_error("linearize: s_t must lie in (0, s_critical)");
  double mu = params.mu_star;
  double root = std::sqrt(s_t * (s_t + mu));
  double u = 0.5 + root / mu;
  // dg/ds = log2(u / (1-u)) * u'(s); u' = (2s + mu*) / (2 mu* sqrt(s(s+mu*)))
  double a = std::log2(u / (1.0 - u)) * (2.0 * s_t + mu) / (2.0 * mu * root);
  double b = g_mu(s_t, params) - a * s_t;
  return {a, b};
}

double f_min(double s, double s_t, const MdlParams& params) {
  if (s <= s_t) return g_mu(s, params);
  Linearization lin = linearize(s_t, params);
  return lin.a * s + lin.b;
}

double zeta(double s_t, double eps_s, double eps_ea, const MdlParams& params) {
  Linearization lin = linearize(s_t, params);
  return 2.0 * (std::log2(9.0) + lin.a * params.mu_max) *
         std::sqrt(1.0 - 2.0 * std::log2(eps_s * eps_ea));
}

RateResult eta_opt(const EatParams& eat, const MdlParams& params) {
  require_positive_mu_star(params, "eta_opt");
  const double s_e = eat.s_exp - eat.delta_est;
  const double s_c = s_critical(params);
  const double margin = 1e-12 * params.mu_star;
  const double penalty_scale =
      std::sqrt(1.0 - 2.0 * std::log2(eat.eps_s * eat.eps_ea)) /
      std::sqrt(eat.n);

  auto value_at = [&](double s_t) {
    Linearization lin = linearize(s_t, params);
    double f = (s_e <= s_t) ? g_mu(s_e, params) : lin.a * s_e + lin.b;
    double z =
        2.0 * (std::log2(9.0) + lin.a * params.mu_max) * penalty_scale;
    return f - z;
  };

  // 200-point bracket, then golden-section inside the winning cell pair.
  const int kGrid = 200;
  const double lo = margin, hi = s_c - margin;
  double best_s = lo, best_v = value_at(lo);
  int best_i = 0;
  for (int i = 1; i < kGrid; ++i) {
    double s = lo + (hi - lo) * static_cast<double>(i) / (kGrid - 1);
    double v = value_at(s);
    if (v > best_v) {
      best_v = v;
      best_s = s;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * static_cast<double>(std::max(0, best_i - 1)) /
                      (kGrid - 1);
  double b = lo + (hi - lo) *
                      static_cast<double>(std::min(kGrid - 1, best_i + 1)) /
                      (kGrid - 1);

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = value_at(x1), f2 = value_at(x2);
  for (int iter = 0; iter < 200 && (b - a) > 1e-16 * s_c; ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = value_at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = value_at(x1);
    }
  }
  double refined_s = (f1 > f2) ? x1 : x2;
  double refined_v = std::max(f1, f2);
  if (refined_v > best_v) {
    best_v = refined_v;
    best_s = refined_s;
  }

  Linearization lin = linearize(best_s, params);
  RateResult out;
  out.eta_opt = best_v;
  out.s_t_star = best_s;
  out.hmin_bound = eat.n * best_v;
  out.a_star = lin.a;
  out.b_star = lin.b;
  out.zeta_star = zeta(best_s, eat.eps_s, eat.eps_ea, params);
  out.positive = best_v > 0.0;
  return out;
}

double completeness_bound(double n, double delta_est, const MdlParams& params) {
  if (!(n >= 1.0)) throw std::invalid_argument("completeness_bound: n >= 1");
  if (!(delta_est > 0.0))
    throw std::invalid_argument("completeness_bound: delta_est > 0");
  double denom = params.mu_min + params.mu_max;
  return std::exp(-2.0 * n * delta_est * delta_est / (denom * denom));
}

double s_mu_of_freq(const FrequencyDist& f, const MdlParams& params) {
  return params.mu_min * f.p_win - params.mu_max * f.p_lose;
}

}  // namespace mdlamp
