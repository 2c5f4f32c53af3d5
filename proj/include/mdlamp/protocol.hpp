#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mdlamp/extractor.hpp"
#include "mdlamp/quantum.hpp"
#include "mdlamp/rates.hpp"
#include "mdlamp/rng.hpp"
#include "mdlamp/sources.hpp"

namespace mdlamp {

enum class DeviceKind { kHonestQuantum, kDeterministicClassical, kScripted };

/// The untrusted device. Honest devices sample an i.i.d. behavior (a
/// possibly depolarized quantum strategy); deterministic devices answer from
/// a fixed per-input table; scripted devices replay a per-round output list
/// (wrapping), with entries above 1 exercising the invalid-output path.
class DeviceModel {
 public:
  static DeviceModel honest_quantum(const QuantumStrategy& strategy,
                                    double depolarize_q);
  static DeviceModel deterministic(std::array<int, 2> a_of_x,
                                   std::array<int, 2> b_of_y);
  static DeviceModel scripted(std::vector<std::array<std::uint8_t, 2>> rounds);

  /// Outputs for round `index` on inputs (x, y). May return values > 1 only
  /// for scripted devices.
  std::pair<int, int> respond(std::int64_t index, int x, int y,
                              RandomStream& rng) const;

  DeviceKind kind() const { return kind_; }
  const Behavior& behavior() const;  // honest devices only

 private:
  DeviceModel() = default;
  DeviceKind kind_ = DeviceKind::kDeterministicClassical;
  std::optional<Behavior> behavior_;
  std::array<std::array<double, 4>, 4> cdf_{};  // per (x,y): cumulative over (a,b)
  std::array<int, 2> a_of_x_{}, b_of_y_{};
  std::vector<std::array<std::uint8_t, 2>> script_;
};

enum class AbortReason { kNone, kBelowThreshold, kInvalidDeviceOutput };

struct RoundRecord {
  std::int64_t index;
  std::uint8_t x, y, a, b;
  double c;  // winning_value(a, b, x, y)
};

struct ProtocolOutcome {
  bool aborted = false;
  AbortReason reason = AbortReason::kNone;
  double c_bar = 0.0;
  std::vector<RoundRecord> rounds;       // empty when transcript is off
  std::optional<BitString> key;          // present iff not aborted and m >= 1
  std::int64_t output_bits = 0;          // m from output_length
  double secrecy_eps = 0.0;              // 12 (eps_s + eps_ext) + eps_ea
  RateResult rate;
};

struct ExtractorConfig {
  std::int64_t d = 0;  // seed length; 0 means the default d = 2n
  double eps_ext = 1e-8;
};

struct RunOptions {
  bool keep_transcript = true;
  bool compute_rate = true;  // rate analysis + extraction; off for abort-rate
                             // experiments where only c_bar matters
};

/// Executes the full protocol: n scored rounds, the abort test
/// (strictly c_bar < s_exp - delta_est; equality does not abort), then on
/// non-abort the seed draw (source history continues past round n) and the
/// extraction pipeline. RNG streams: round i draws its input pair on stream
/// 2i and its device outputs on stream 2i+1, the seed on stream 2n.
ProtocolOutcome run(const DeviceModel& device, const SourceModel& source,
                    const EatParams& eat, const ExtractorConfig& ext_cfg,
                    const CounterRng& rng, const RunOptions& options = {});

/// eps_RA = 12 (eps_s + eps_ext) + eps_ea.
double secrecy_epsilon(double eps_s, double eps_ext, double eps_ea);

struct AbortExperiment {
  std::int64_t trials = 0;
  std::int64_t aborts = 0;
  double abort_rate = 0.0;
  double hoeffding_bound = 0.0;
  double n = 0.0;
  double delta_est = 0.0;
};

/// Monte-Carlo abort frequency of `trials` independent seeded runs next to
/// the analytic completeness bound. Trials are sharded across threads; each
/// trial derives its own generator, so the result is thread-count
/// independent.
AbortExperiment honest_abort_experiment(std::int64_t trials,
                                        const DeviceModel& device,
                                        const SourceModel& source,
                                        const EatParams& eat,
                                        const CounterRng& rng,
                                        int threads = 0);

}  // namespace mdlamp
