#include "mdlamp/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace mdlamp {

namespace {
constexpr std::uint64_t kTrialStream = 0x7261697e'00000000ull;
}

DeviceModel DeviceModel::honest_quantum(const QuantumStrategy& strategy,
                                        double depolarize_q) {
  DeviceModel dev;
  dev.kind_ = DeviceKind::kHonestQuantum;
  QuantumStrategy noisy{depolarize(strategy.state, depolarize_q),
                        strategy.alice, strategy.bob};
  dev.behavior_ = born_behavior(noisy);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          acc += dev.behavior_->p(a, b, x, y);
          dev.cdf_[(x << 1) | y][(a << 1) | b] = acc;
        }
    }
  return dev;
}

DeviceModel DeviceModel::deterministic(std::array<int, 2> a_of_x,
                                       std::array<int, 2> b_of_y) {
  for (int v : a_of_x)
    if (v != 0 && v != 1)
      throw std::invalid_argument("DeviceModel: table entries must be bits");
  for (int v : b_of_y)
    if (v != 0 && v != 1)
      throw std::invalid_argument("DeviceModel: table entries must be bits");
  DeviceModel dev;
  dev.kind_ = DeviceKind::kDeterministicClassical;
  dev.a_of_x_ = a_of_x;
  dev.b_of_y_ = b_of_y;
  return dev;
}

DeviceModel DeviceModel::scripted(
    std::vector<std::array<std::uint8_t, 2>> rounds) {
  if (rounds.empty())
    throw std::invalid_argument("DeviceModel: script must be nonempty");
  DeviceModel dev;
  dev.kind_ = DeviceKind::kScripted;
  dev.script_ = std::move(rounds);
  return dev;
}

const Behavior& DeviceModel::behavior() const {
  if (!behavior_)
    throw std::logic_error("DeviceModel: only honest devices have a behavior");
  return *behavior_;
}

std::pair<int, int> DeviceModel::respond(std::int64_t index, int x, int y,
                                         RandomStream& rng) const {
  switch (kind_) {
    case DeviceKind::kHonestQuantum: {
      const auto& cdf = cdf_[(x << 1) | y];
      double u = rng.next_uniform();
      for (int cell = 0; cell < 4; ++cell)
        if (u < cdf[cell]) return {cell >> 1, cell & 1};
      return {1, 1};
    }
    case DeviceKind::kDeterministicClassical:
      return {a_of_x_[x], b_of_y_[y]};
    case DeviceKind::kScripted: {
      const auto& r = script_[static_cast<std::size_t>(index) % script_.size()];
      return {r[0], r[1]};
    }
  }
  throw std::logic_error("DeviceModel: unknown kind");
}

double secrecy_epsilon(double eps_s, double eps_ext, double eps_ea) {
  return 12.0 * (eps_s + eps_ext) + eps_ea;
}

ProtocolOutcome run(const DeviceModel& device, const SourceModel& source,
                    const EatParams& eat, const ExtractorConfig& ext_cfg,
                    const CounterRng& rng, const RunOptions& options) {
  if (eat.n < 1.0 || eat.n != std::floor(eat.n) || eat.n > 9e15)
    throw std::invalid_argument("run: n must be a positive integer round count");
  const std::int64_t n = static_cast<std::int64_t>(eat.n);
  const std::int64_t d = (ext_cfg.d == 0) ? 2 * n : ext_cfg.d;

  ProtocolOutcome out;
  if (options.keep_transcript) out.rounds.reserve(static_cast<std::size_t>(n));

  PairHistory history;
  const bool track_history = source.history_dependent();
  if (track_history) {
    history.xs.reserve(static_cast<std::size_t>(n));
    history.ys.reserve(static_cast<std::size_t>(n));
  }

  BitString first;
  if (options.compute_rate) first = BitString(static_cast<std::size_t>(2 * n));

  // Compensated summation keeps the streamed mean reproducible from the
  // transcript to 1e-12.
  double sum = 0.0, comp = 0.0;
  std::int64_t executed = 0;
  bool invalid_output = false;

  for (std::int64_t i = 0; i < n; ++i) {
    RandomStream source_rng(rng, static_cast<std::uint64_t>(2 * i));
    auto [x, y] = sample_pair(source, history, source_rng);
    RandomStream device_rng(rng, static_cast<std::uint64_t>(2 * i + 1));
    auto [a, b] = device.respond(i, x, y, device_rng);
    if ((a & ~1) != 0 || (b & ~1) != 0) {
      invalid_output = true;
      break;
    }
    ++executed;
    double c = winning_value(a, b, x, y, source.params);
    double t = c - comp;
    double s = sum + t;
    comp = (s - sum) - t;
    sum = s;
    if (track_history) history.push(x, y);
    if (options.compute_rate) {
      first.set(static_cast<std::size_t>(i), a);
      first.set(static_cast<std::size_t>(n + i), b);
    }
    if (options.keep_transcript)
      out.rounds.push_back(RoundRecord{i, static_cast<std::uint8_t>(x),
                                       static_cast<std::uint8_t>(y),
                                       static_cast<std::uint8_t>(a),
                                       static_cast<std::uint8_t>(b), c});
  }

  out.c_bar = (executed > 0) ? sum / static_cast<double>(executed) : 0.0;
  if (invalid_output) {
    out.aborted = true;
    out.reason = AbortReason::kInvalidDeviceOutput;
  } else if (out.c_bar < eat.s_exp - eat.delta_est) {  // strict: equality passes
    out.aborted = true;
    out.reason = AbortReason::kBelowThreshold;
  }

  if (!options.compute_rate) return out;

  out.rate = eta_opt(eat, source.params);
  out.secrecy_eps = secrecy_epsilon(eat.eps_s, ext_cfg.eps_ext, eat.eps_ea);
  out.output_bits = output_length(n, out.rate.eta_opt, d, source.params,
                                  ext_cfg.eps_ext, eat.eps_s);

  if (!out.aborted && out.output_bits >= 1) {
    // Seed bits are drawn strictly after round n; they extend the source
    // history but can never influence the recorded rounds.
    RandomStream seed_rng(rng, static_cast<std::uint64_t>(2 * n));
    BitString seed = draw_seed(source, d, seed_rng, std::move(history));

    const std::int64_t N = std::max(2 * n, d);
    out.key = conv_extract(first.resized(static_cast<std::size_t>(N)),
                           seed.resized(static_cast<std::size_t>(N)),
                           out.output_bits);
  }
  return out;
}

AbortExperiment honest_abort_experiment(std::int64_t trials,
                                        const DeviceModel& device,
                                        const SourceModel& source,
                                        const EatParams& eat,
                                        const CounterRng& rng, int threads) {
  if (trials < 1)
    throw std::invalid_argument("honest_abort_experiment: trials >= 1");
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw ? static_cast<int>(hw) : 1;
  }
  threads = static_cast<int>(
      std::min<std::int64_t>(trials, static_cast<std::int64_t>(threads)));

  RunOptions light;
  light.keep_transcript = false;
  light.compute_rate = false;

  std::vector<std::int64_t> aborts(static_cast<std::size_t>(threads), 0);
  auto worker = [&](int t) {
    std::int64_t local = 0;
    for (std::int64_t trial = t; trial < trials; trial += threads) {
      CounterRng trial_rng(
          rng.word(kTrialStream, static_cast<std::uint64_t>(trial)));
      ProtocolOutcome o = run(device, source, eat, ExtractorConfig{},
                              trial_rng, light);
      if (o.aborted) ++local;
    }
    aborts[static_cast<std::size_t>(t)] = local;
  };

  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& t : pool) t.join();

  AbortExperiment exp;
  exp.trials = trials;
  for (std::int64_t a : aborts) exp.aborts += a;
  exp.abort_rate =
      static_cast<double>(exp.aborts) / static_cast<double>(trials);
  exp.hoeffding_bound = completeness_bound(eat.n, eat.delta_est, source.params);
  exp.n = eat.n;
  exp.delta_est = eat.delta_est;
  return exp;
}

}  // namespace mdlamp
