#include "mdlamp/sources.hpp"

#include <cmath>
#include <stdexcept>

namespace mdlamp {

namespace {
constexpr double kSumTol = 1e-12;
constexpr double kBoxTol = 1e-12;
}  // namespace

SvParams::SvParams(double mu_) : mu(mu_) {
  if (!(mu > 0.0 && mu < 0.5))
    throw std::invalid_argument("SvParams: mu must lie in (0, 0.5)");
}

MdlParams::MdlParams(double mu_min_, double mu_max_)
    : mu_min(mu_min_), mu_max(mu_max_), mu_star(mu_min_ * mu_max_) {
  if (!(mu_min >= 0.0 && mu_min <= 0.25))
    throw std::invalid_argument("MdlParams: mu_min must lie in [0, 1/4]");
  if (!(mu_max >= 0.25 && mu_max < 1.0))
    throw std::invalid_argument("MdlParams: mu_max must lie in [1/4, 1)");
  // 4*mu_min <= 1 <= 4*mu_max follows, so the box always contains a
  // normalized distribution.
}

MdlParams sv_to_mdl(const SvParams& sv) {
  double lo = 0.5 - sv.mu;
  double hi = 0.5 + sv.mu;
  return MdlParams(lo * lo, hi * hi);
}

void InputDistribution::validate_in_box(const MdlParams& params) const {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= params.mu_min - kBoxTol && v <= params.mu_max + kBoxTol))
      throw std::invalid_argument(
          "InputDistribution: entry outside [mu_min, mu_max]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTol)
    throw std::invalid_argument("InputDistribution: not normalized");
}

static InputDistribution extremal_dist(const MdlParams& params, int fx,
                                       int fy) {
  // Largest feasible weight on the favored pair; the equal split of the
  // remainder stays inside the box for every valid MdlParams.
  double q = std::min(params.mu_max, 1.0 - 3.0 * params.mu_min);
  double rest = (1.0 - q) / 3.0;
  InputDistribution d;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) d.at(x, y) = (x == fx && y == fy) ? q : rest;
  return d;
}

SourceModel SourceModel::make_iid(const MdlParams& params,
                                  const InputDistribution& dist) {
  dist.validate_in_box(params);
  SourceModel m{SourceKind::kIid, params, dist, 0, 0, {}};
  return m;
}

SourceModel SourceModel::make_uniform_iid(const MdlParams& params) {
  return make_iid(params, InputDistribution::uniform());
}

SourceModel SourceModel::make_extremal(const MdlParams& params, int x, int y) {
  SourceModel m{SourceKind::kExtremalFavoring, params,
                extremal_dist(params, x, y), x & 1, y & 1, {}};
  return m;
}

SourceModel SourceModel::make_history_toggle(const MdlParams& params) {
  SourceModel m{SourceKind::kHistoryToggle, params, {}, 0, 0, {}};
  return m;
}

SourceModel SourceModel::make_scripted(const MdlParams& params,
                                       BitString script) {
  if (script.empty() || script.size() % 2 != 0)
    throw std::invalid_argument(
        "SourceModel: script must hold a nonzero even number of bits");
  SourceModel m{SourceKind::kScripted, params, {}, 0, 0, std::move(script)};
  return m;
}

InputDistribution SourceModel::conditional(const PairHistory& history) const {
  switch (kind) {
    case SourceKind::kIid:
    case SourceKind::kExtremalFavoring:
      return iid;
    case SourceKind::kHistoryToggle: {
      int px = 0, py = 0;
      for (std::uint8_t b : history.xs) px ^= b;
      for (std::uint8_t b : history.ys) py ^= b;
      return extremal_dist(params, px, py);
    }
    case SourceKind::kScripted: {
      std::size_t pair = history.size() % (script.size() / 2);
      InputDistribution d;
      d.p = {0.0, 0.0, 0.0, 0.0};
      d.at(script.bit(2 * pair), script.bit(2 * pair + 1)) = 1.0;
      return d;
    }
  }
  throw std::logic_error("SourceModel: unknown kind");
}

static bool audit_rec(const SourceModel& model, PairHistory& history,
                      int depth, std::string* why) {
  InputDistribution d = model.conditional(history);
  double sum = 0.0;
  for (double v : d.p) sum += v;
  bool ok = std::abs(sum - 1.0) <= kSumTol;
  for (double v : d.p)
    ok = ok && v >= model.params.mu_min - kBoxTol &&
         v <= model.params.mu_max + kBoxTol;
  if (!ok) {
    if (why)
      *why = "conditional distribution out of box at history depth " +
             std::to_string(history.size());
    return false;
  }
  if (depth == 0) return true;
  // Only histories the model actually distinguishes need expanding.
  if (!model.history_dependent()) return true;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (d(x, y) == 0.0) continue;
      history.push(x, y);
      bool sub = audit_rec(model, history, depth - 1, why);
      history.xs.pop_back();
      history.ys.pop_back();
      if (!sub) return false;
    }
  return true;
}

bool audit_source(const SourceModel& model, int depth, std::string* why) {
  if (model.kind == SourceKind::kScripted) return true;
  PairHistory h;
  return audit_rec(model, h, depth, why);
}

std::pair<int, int> sample_pair(const SourceModel& model,
                                const PairHistory& history,
                                RandomStream& rng) {
  InputDistribution d = model.conditional(history);
  double u = rng.next_uniform();
  double acc = 0.0;
  for (int cell = 0; cell < 4; ++cell) {
    acc += d.p[cell];
    if (u < acc) return {cell >> 1, cell & 1};
  }
  return {1, 1};  // u landed in the rounding slack at the top
}

BitString draw_seed(const SourceModel& model, std::int64_t d,
                    RandomStream& rng, PairHistory history) {
  if (d < 0 || d % 2 != 0)
    throw std::invalid_argument("draw_seed: d must be even and nonnegative");
  BitString out;
  for (std::int64_t i = 0; i < d / 2; ++i) {
    auto [x, y] = sample_pair(model, history, rng);
    out.push_back(x);
    out.push_back(y);
    history.push(x, y);
  }
  return out;
}

double seed_min_entropy(std::int64_t d, const MdlParams& params) {
  if (d < 0 || d % 2 != 0)
    throw std::invalid_argument(
        "seed_min_entropy: d must be even and nonnegative");
  return -(static_cast<double>(d) / 2.0) * std::log2(params.mu_max);
}

}  // namespace mdlamp
