#include "mdlamp/extractor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "mdlamp/rng.hpp"

namespace mdlamp {

namespace {

// Family construction is pinned by this seed; changing it invalidates every
// frozen exact_error value.
constexpr std::uint64_t kFamilySeed = 0x0f2a6e5335c1d04bull;

std::vector<std::uint64_t> pack_words(const BitString& s, std::size_t words) {
  std::vector<std::uint64_t> out(words, 0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.bit(i)) out[i / 64] |= 1ull << (i % 64);
  return out;
}

inline std::uint64_t fetch64(const std::vector<std::uint64_t>& w,
                             std::size_t bit_offset) {
  std::size_t word = bit_offset / 64, shift = bit_offset % 64;
  std::uint64_t lo = w[word] >> shift;
  std::uint64_t hi = (shift == 0) ? 0 : (w[word + 1] << (64 - shift));
  return lo | hi;
}

}  // namespace

ExtractorParams::ExtractorParams(std::int64_t n1_, std::int64_t d_,
                                 std::int64_t m_, double k1_, double k2_,
                                 double eps_ext_)
    : n1(n1_), d(d_), m(m_), k1(k1_), k2(k2_), eps_ext(eps_ext_) {
  if (m < 1) throw std::invalid_argument("ExtractorParams: m must be >= 1");
  if (k1 > static_cast<double>(n1) || k2 > static_cast<double>(d))
    throw std::invalid_argument("ExtractorParams: entropy exceeds length");
  if (!(eps_ext > 0.0 && eps_ext < 1.0))
    throw std::invalid_argument("ExtractorParams: eps_ext must lie in (0, 1)");
}

BitString conv_extract(const BitString& x, const BitString& z,
                       std::int64_t m) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  if (n == 0 || n != static_cast<std::int64_t>(z.size()))
    throw std::invalid_argument("conv_extract: inputs must have equal nonzero length");
  if (m < 1 || m > n)
    throw std::invalid_argument("conv_extract: m must lie in [1, N]");

  const std::size_t xw = static_cast<std::size_t>((n + 63) / 64);
  std::vector<std::uint64_t> xbits = pack_words(x, xw);

  // v0[i] = z[(-i) mod N]; out_j = parity(x & rot(v0, j)). Doubling v0 turns
  // each rotation into a bit-window read at offset N - j.
  BitString doubled(static_cast<std::size_t>(2 * n));
  for (std::int64_t i = 0; i < n; ++i) {
    int b = z.bit(static_cast<std::size_t>((n - i) % n));
    doubled.set(static_cast<std::size_t>(i), b);
    doubled.set(static_cast<std::size_t>(i + n), b);
  }
  std::vector<std::uint64_t> w =
      pack_words(doubled, static_cast<std::size_t>((2 * n) / 64 + 2));

  BitString out(static_cast<std::size_t>(m));
  auto compute_range = [&](std::int64_t j0, std::int64_t j1) {
    for (std::int64_t j = j0; j < j1; ++j) {
      std::size_t offset = static_cast<std::size_t>(n - j);
      std::uint64_t acc = 0;
      for (std::size_t t = 0; t < xw; ++t)
        acc ^= xbits[t] & fetch64(w, offset + 64 * t);
      out.set(static_cast<std::size_t>(j), std::popcount(acc) & 1);
    }
  };

  const std::int64_t work = m * static_cast<std::int64_t>(xw);
  unsigned hw = std::thread::hardware_concurrency();
  if (work > (1 << 24) && hw > 1) {
    std::int64_t half = m / 2;
    std::thread t([&] { compute_range(0, half); });
    compute_range(half, m);
    t.join();
  } else {
    compute_range(0, m);
  }
  return out;
}

ClassicalRequirement classical_requirement(std::int64_t n_bits, std::int64_t m,
                                           double eps) {
  if (m < 1) throw std::invalid_argument("classical_requirement: m >= 1");
  if (n_bits < m)
    throw std::invalid_argument("classical_requirement: m exceeds input length");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("classical_requirement: eps must lie in (0, 1)");
  double k = (static_cast<double>(n_bits) + 2.0 * static_cast<double>(m) +
              2.0 * std::log2(1.0 / eps)) /
             2.0;
  return {k, k, k <= static_cast<double>(n_bits)};
}

LiftedParams markov_lift(const ExtractorParams& p) {
  double loss = std::log2(1.0 / p.eps_ext);
  // kept in log space so huge m cannot overflow the requirement arithmetic
  double log2_eps = 0.5 * (std::log2(3.0) + std::log2(p.eps_ext) +
                           static_cast<double>(p.m - 2));
  double lifted_eps = std::exp2(log2_eps);
  return {p.k1 + loss, p.k2 + loss, lifted_eps, log2_eps, log2_eps < 0.0};
}

SmoothRequirement smooth_requirement(const LiftedParams& lifted, double eps_s) {
  if (!(eps_s >= 0.0 && eps_s < 1.0))
    throw std::invalid_argument("smooth_requirement: eps_s must lie in [0, 1)");
  double loss = -lifted.log2_eps + 1.0;
  return {lifted.k1 + loss, lifted.k2 + loss,
          6.0 * (eps_s + lifted.eps)};
}

std::int64_t output_length(std::int64_t n, double eta, std::int64_t d,
                           const MdlParams& params, double eps_ext,
                           double eps_s) {
  if (n < 1) throw std::invalid_argument("output_length: n must be >= 1");
  if (eta <= 0.0) return 0;

  const std::int64_t N = std::max(2 * n, d);
  const double device_budget = 2.0 * static_cast<double>(n) * eta;
  const double seed_budget = seed_min_entropy(d, params);

  // The binding constraints are the two entropy budgets; the markov_lift
  // feasibility flag (lifted error reaching 1) is the caller's to inspect
  // when judging what the produced key is worth.
  auto fits = [&](std::int64_t m) {
    ClassicalRequirement cr = classical_requirement(N, m, eps_ext);
    if (!cr.feasible) return false;
    LiftedParams lifted =
        markov_lift(ExtractorParams(N, N, m, cr.k1, cr.k2, eps_ext));
    SmoothRequirement req = smooth_requirement(lifted, eps_s);
    return req.k1_req <= device_budget && req.k2_req <= seed_budget;
  };

  if (!fits(1)) return 0;
  // The requirement chain is monotone in m, so binary search the boundary.
  std::int64_t lo = 1, hi = N;
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

std::vector<std::vector<std::uint32_t>> exact_error_family(int n_bits, int k) {
  if (n_bits < 1 || n_bits > 8)
    throw std::invalid_argument("exact_error_family: need 1 <= N <= 8");
  if (k < 0 || k > n_bits)
    throw std::invalid_argument("exact_error_family: need 0 <= k <= N");
  const std::uint32_t universe = 1u << n_bits;
  const std::uint32_t size = 1u << k;

  std::vector<std::vector<std::uint32_t>> family;
  std::set<std::vector<std::uint32_t>> seen;
  auto add = [&](std::vector<std::uint32_t> subset) {
    std::sort(subset.begin(), subset.end());
    if (seen.insert(subset).second) family.push_back(std::move(subset));
  };

  for (std::uint32_t start = 0; start < universe; ++start) {
    std::vector<std::uint32_t> interval(size);
    for (std::uint32_t i = 0; i < size; ++i)
      interval[i] = (start + i) % universe;
    add(std::move(interval));
  }

  CounterRng rng(kFamilySeed);
  for (int r = 0; r < 200; ++r) {
    std::vector<std::uint32_t> pool(universe);
    for (std::uint32_t i = 0; i < universe; ++i) pool[i] = i;
    std::uint64_t stream = (static_cast<std::uint64_t>(k) << 16) |
                           static_cast<std::uint64_t>(r);
    for (std::uint32_t i = 0; i < size; ++i) {
      std::uint32_t j =
          i + static_cast<std::uint32_t>(rng.word(stream, i) % (universe - i));
      std::swap(pool[i], pool[j]);
    }
    add(std::vector<std::uint32_t>(pool.begin(), pool.begin() + size));
  }
  return family;
}

double exact_error(int n_bits, int m, int k1, int k2) {
  if (n_bits < 1 || n_bits > 8)
    throw std::invalid_argument("exact_error: need 1 <= N <= 8");
  if (m < 1 || m > n_bits)
    throw std::invalid_argument("exact_error: need 1 <= m <= N");
  const std::uint32_t universe = 1u << n_bits;
  const std::uint32_t outcomes = 1u << m;
  const double p_uniform = 1.0 / static_cast<double>(outcomes);

  // Output table of the real extractor for every input pair.
  std::vector<std::uint16_t> table(
      static_cast<std::size_t>(universe) * universe);
  for (std::uint32_t xv = 0; xv < universe; ++xv) {
    BitString xs(static_cast<std::size_t>(n_bits));
    for (int i = 0; i < n_bits; ++i) xs.set(i, (xv >> i) & 1);
    for (std::uint32_t zv = 0; zv < universe; ++zv) {
      BitString zs(static_cast<std::size_t>(n_bits));
      for (int i = 0; i < n_bits; ++i) zs.set(i, (zv >> i) & 1);
      BitString key = conv_extract(xs, zs, m);
      std::uint16_t packed = 0;
      for (int j = 0; j < m; ++j)
        packed |= static_cast<std::uint16_t>(key.bit(j) << j);
      table[static_cast<std::size_t>(xv) * universe + zv] = packed;
    }
  }

  auto familyX = exact_error_family(n_bits, k1);
  auto familyZ = exact_error_family(n_bits, k2);

  double worst = 0.0;
  std::vector<double> per_z(universe);
  std::vector<std::uint32_t> hist(outcomes);
  for (const auto& sx : familyX) {
    const double inv_x = 1.0 / static_cast<double>(sx.size());
    // Per-z statistical distance of the output from uniform, x flat on sx.
    for (std::uint32_t zv = 0; zv < universe; ++zv) {
      std::fill(hist.begin(), hist.end(), 0);
      for (std::uint32_t xv : sx)
        ++hist[table[static_cast<std::size_t>(xv) * universe + zv]];
      double dist = 0.0;
      for (std::uint32_t out = 0; out < outcomes; ++out)
        dist += std::abs(static_cast<double>(hist[out]) * inv_x - p_uniform);
      per_z[zv] = 0.5 * dist;
    }
    for (const auto& sz : familyZ) {
      double sum = 0.0;
      for (std::uint32_t zv : sz) sum += per_z[zv];
      double err = sum / static_cast<double>(sz.size());
      if (err > worst) worst = err;
    }
  }
  return worst;
}

}  // namespace mdlamp
