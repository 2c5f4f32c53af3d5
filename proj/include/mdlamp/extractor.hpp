#pragma once

#include <cstdint>
#include <vector>

#include "mdlamp/bitstring.hpp"
#include "mdlamp/sources.hpp"

namespace mdlamp {

/// Parameters of a classical strong two-source extractor instance.
struct ExtractorParams {
  std::int64_t n1;     // first-input length (device outputs, 2n)
  std::int64_t d;      // second-input length (seed)
  std::int64_t m;      // output length
  double k1;           // min-entropy requirement on the first input
  double k2;           // min-entropy requirement on the second input
  double eps_ext;      // extractor error, in (0, 1)
  ExtractorParams(std::int64_t n1_, std::int64_t d_, std::int64_t m_,
                  double k1_, double k2_, double eps_ext_);
};

/// Cyclic GF(2) convolution truncated to m bits:
/// out_j = XOR_i x_i * z_{(j-i) mod N}, j = 0..m-1. Linear in each input for
/// the other one fixed. Throws on length mismatch or m outside [1, N].
BitString conv_extract(const BitString& x, const BitString& z, std::int64_t m);

struct ClassicalRequirement {
  double k1;
  double k2;
  bool feasible;  // false when the requirement exceeds the input length
};

/// Symmetric sum-rule requirement assumed sufficient for conv_extract:
/// k1 = k2 = (N + 2m + 2 log2(1/eps)) / 2. An assumption, not a theorem;
/// exact_error validates it empirically at toy sizes.
ClassicalRequirement classical_requirement(std::int64_t n_bits, std::int64_t m,
                                           double eps);

struct LiftedParams {
  double k1;
  double k2;
  double eps;       // sqrt(3 eps 2^(m-2)); saturates to inf for huge m
  double log2_eps;  // overflow-safe log2 of the same value, authoritative
  bool feasible;    // false when the lifted error reaches 1
};

/// Classical-to-Markov-model lift: (k1, k2, eps) becomes
/// (k1 + log2(1/eps), k2 + log2(1/eps), sqrt(3 eps 2^(m-2))).
LiftedParams markov_lift(const ExtractorParams& p);

struct SmoothRequirement {
  double k1_req;       // smooth-min-entropy threshold on the first input
  double k2_req;       // min-entropy threshold on the second input
  double final_error;  // 6 (eps_s + eps)
};

/// Min-entropy to smooth-min-entropy lift: thresholds gain log2(1/eps) + 1,
/// the error becomes 6 (eps_s + eps).
SmoothRequirement smooth_requirement(const LiftedParams& lifted, double eps_s);

/// Largest m >= 1 whose full requirement chain (classical_requirement at
/// N = max(2n, d), then markov_lift, then smooth_requirement) fits under the
/// device-side entropy budget 2 n eta and the seed-side budget
/// seed_min_entropy(d, params); 0 when no m fits. eta <= 0 gives 0.
std::int64_t output_length(std::int64_t n, double eta, std::int64_t d,
                           const MdlParams& params, double eps_ext,
                           double eps_s);

/// The flat-source family probed by exact_error for one entropy value k:
/// all 2^N cyclic windows of size 2^k plus 200 pseudorandom subsets (fixed
/// seed), deduplicated, each sorted ascending.
std::vector<std::vector<std::uint32_t>> exact_error_family(int n_bits, int k);

/// Brute-force worst-case strong-in-second-input statistical distance of
/// conv_extract over the documented flat-source family. Deterministic; the
/// per-z sums run over outputs ascending, the outer mean over support
/// ascending, families in construction order. N <= 8 only.
double exact_error(int n_bits, int m, int k1, int k2);

}  // namespace mdlamp
