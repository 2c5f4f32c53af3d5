#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mdlamp/bitstring.hpp"
#include "mdlamp/rng.hpp"

namespace mdlamp {

/// Santha-Vazirani source bias: every bit, given all previous ones, has
/// probability of 0 inside [1/2 - mu, 1/2 + mu].
struct SvParams {
  double mu;
  explicit SvParams(double mu_);
};

/// Pair-source constraints: every conditional pair probability lies in
/// [mu_min, mu_max]. mu_star = mu_min * mu_max shows up in all the entropy
/// bounds, so it is cached here.
///
/// mu_min = 0 and the closed endpoints at 1/4 are admitted; the degenerate
/// mu_star = 0 is rejected by the rate functions that would divide by it.
struct MdlParams {
  double mu_min;
  double mu_max;
  double mu_star;
  MdlParams(double mu_min_, double mu_max_);
};

MdlParams sv_to_mdl(const SvParams& sv);

/// Distribution over the four input pairs (x, y); index (x << 1) | y.
struct InputDistribution {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};

  double operator()(int x, int y) const { return p[(x << 1) | y]; }
  double& at(int x, int y) { return p[(x << 1) | y]; }

  static InputDistribution uniform() { return {}; }
  /// Throws if not normalized (1e-12) or outside [mu_min, mu_max].
  void validate_in_box(const MdlParams& params) const;
};

enum class SourceKind { kIid, kExtremalFavoring, kHistoryToggle, kScripted };

/// Input-pair history of a run; the conditional distributions of the
/// history-dependent models are functions of this only.
struct PairHistory {
  std::vector<std::uint8_t> xs, ys;
  std::size_t size() const { return xs.size(); }
  void push(int x, int y) {
    xs.push_back(static_cast<std::uint8_t>(x & 1));
    ys.push_back(static_cast<std::uint8_t>(y & 1));
  }
};

/// An adversarial input source. The model is immutable; all sampling state
/// lives in (history, rng), so concurrent shards never share mutable state.
///
/// kIid               -- fixed in-box distribution every round
/// kExtremalFavoring  -- the favored pair gets min(mu_max, 1 - 3 mu_min),
///                       the rest split equally (always inside the box)
/// kHistoryToggle     -- extremal distribution whose favored pair is
///                       (parity of past x bits, parity of past y bits)
/// kScripted          -- replays a fixed pair script verbatim (wraps around);
///                       a test fixture standing for one realized adversary
///                       strategy, exempt from the box audit
struct SourceModel {
  SourceKind kind;
  MdlParams params;
  InputDistribution iid;
  int favored_x = 0, favored_y = 0;
  BitString script;  // pairs: x_i = bit 2i, y_i = bit 2i+1

  static SourceModel make_iid(const MdlParams& params,
                              const InputDistribution& dist);
  static SourceModel make_uniform_iid(const MdlParams& params);
  static SourceModel make_extremal(const MdlParams& params, int x, int y);
  static SourceModel make_history_toggle(const MdlParams& params);
  static SourceModel make_scripted(const MdlParams& params, BitString script);

  /// Conditional pair distribution after the given history.
  InputDistribution conditional(const PairHistory& history) const;

  bool history_dependent() const {
    return kind == SourceKind::kHistoryToggle || kind == SourceKind::kScripted;
  }
};

/// Checks that every conditional distribution reachable within `depth` rounds
/// is normalized and inside the box. Scripted models pass vacuously. Returns
/// false and fills `why` (if given) on the first violation.
bool audit_source(const SourceModel& model, int depth = 8,
                  std::string* why = nullptr);

/// Draws one input pair from the model's conditional distribution given the
/// history. Reproducible: the result is a pure function of (model, history,
/// rng stream state).
std::pair<int, int> sample_pair(const SourceModel& model,
                                const PairHistory& history, RandomStream& rng);

/// Draws d bits (d even) pairwise from the source, continuing from `history`.
BitString draw_seed(const SourceModel& model, std::int64_t d, RandomStream& rng,
                    PairHistory history = {});

/// Worst-case min-entropy of a d-bit source output, in bits:
/// -(d/2) * log2(mu_max).
double seed_min_entropy(std::int64_t d, const MdlParams& params);

}  // namespace mdlamp
