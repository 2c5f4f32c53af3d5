#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "mdlamp/extractor.hpp"

using namespace mdlamp;

namespace {

// Independent bit-by-bit convolution, straight from the defining sum.
BitString conv_naive(const BitString& x, const BitString& z, int m) {
  const int n = static_cast<int>(x.size());
  BitString out(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    int bit = 0;
    for (int i = 0; i < n; ++i)
      bit ^= x.bit(i) & z.bit(static_cast<std::size_t>(((j - i) % n + n) % n));
    out.set(static_cast<std::size_t>(j), bit);
  }
  return out;
}

BitString bits_of(std::uint32_t v, int n) {
  BitString s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.set(static_cast<std::size_t>(i), (v >> i) & 1);
  return s;
}

BitString xor_bits(const BitString& a, const BitString& b) {
  BitString out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.bit(i) ^ b.bit(i));
  return out;
}

}  // namespace

TEST_CASE("conv_extract hand cases") {
  BitString zeros = BitString::from_string("00000000");
  BitString z = BitString::from_string("10110100");
  BitString out = conv_extract(zeros, z, 8);
  CHECK(out.to_string() == "00000000");

  CHECK(conv_extract(BitString::from_string("1000"),
                     BitString::from_string("1100"), 2)
            .to_string() == "11");
}

TEST_CASE("conv_extract argument validation") {
  BitString a = BitString::from_string("1010");
  BitString b = BitString::from_string("101");
  CHECK_THROWS_AS(conv_extract(a, b, 2), std::invalid_argument);
  CHECK_THROWS_AS(conv_extract(a, a, 5), std::invalid_argument);
  CHECK_THROWS_AS(conv_extract(a, a, 0), std::invalid_argument);
}

TEST_CASE("conv_extract matches the naive oracle exhaustively up to N = 6") {
  for (int n = 1; n <= 6; ++n) {
    for (std::uint32_t xv = 0; xv < (1u << n); ++xv)
      for (std::uint32_t zv = 0; zv < (1u << n); ++zv) {
        BitString x = bits_of(xv, n), z = bits_of(zv, n);
        for (int m = 1; m <= n; ++m)
          CHECK(conv_extract(x, z, m) == conv_naive(x, z, m));
      }
  }
}

TEST_CASE("bilinearity in the first input, exhaustively at N = 5") {
  const int n = 5;
  for (std::uint32_t xv = 0; xv < (1u << n); ++xv)
    for (std::uint32_t xv2 = 0; xv2 < (1u << n); ++xv2)
      for (std::uint32_t zv = 0; zv < (1u << n); zv += 3) {
        BitString x1 = bits_of(xv, n), x2 = bits_of(xv2, n), z = bits_of(zv, n);
        CHECK(conv_extract(xor_bits(x1, x2), z, n) ==
              xor_bits(conv_extract(x1, z, n), conv_extract(x2, z, n)));
      }
}

TEST_CASE("cyclic shift covariance at full output length") {
  const int n = 6;
  for (std::uint32_t xv = 0; xv < (1u << n); xv += 5)
    for (std::uint32_t zv = 0; zv < (1u << n); ++zv) {
      BitString x = bits_of(xv, n), z = bits_of(zv, n);
      BitString z_shift(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        z_shift.set(static_cast<std::size_t>(i),
                    z.bit(static_cast<std::size_t>((i - 1 + n) % n)));
      BitString out = conv_extract(x, z, n);
      BitString out_shift = conv_extract(x, z_shift, n);
      for (int j = 0; j < n; ++j)
        CHECK(out_shift.bit(static_cast<std::size_t>(j)) ==
              out.bit(static_cast<std::size_t>((j - 1 + n) % n)));
    }
}

TEST_CASE("output joint distribution over all 2^12 input pairs at N=6, m=2") {
  const int n = 6, m = 2;
  std::map<std::pair<int, int>, long> joint;
  for (std::uint32_t xv = 0; xv < (1u << n); ++xv)
    for (std::uint32_t zv = 0; zv < (1u << n); ++zv) {
      BitString out = conv_extract(bits_of(xv, n), bits_of(zv, n), m);
      joint[{out.bit(0), out.bit(1)}]++;
      // conditioned on z outside the two degenerate atoms (all-zeros and
      // all-ones) each output bit is exactly unbiased and the pair is
      // exactly pairwise independent; the atoms skew the totals below.
    }
  CHECK(joint[{0, 0}] == 1088);
  CHECK(joint[{0, 1}] == 992);
  CHECK(joint[{1, 0}] == 992);
  CHECK(joint[{1, 1}] == 1024);

  for (std::uint32_t zv = 0; zv < (1u << n); ++zv) {
    if (zv == 0 || zv == (1u << n) - 1) continue;
    std::map<std::pair<int, int>, long> per_z;
    for (std::uint32_t xv = 0; xv < (1u << n); ++xv) {
      BitString out = conv_extract(bits_of(xv, n), bits_of(zv, n), m);
      per_z[{out.bit(0), out.bit(1)}]++;
    }
    CHECK(per_z[{0, 0}] == 16);
    CHECK(per_z[{0, 1}] == 16);
    CHECK(per_z[{1, 0}] == 16);
    CHECK(per_z[{1, 1}] == 16);
  }
}

TEST_CASE("classical_requirement sum rule") {
  ClassicalRequirement r = classical_requirement(8, 1, 0.25);
  CHECK(r.k1 == 7.0);
  CHECK(r.k2 == 7.0);
  CHECK(r.feasible);

  CHECK_THROWS_AS(classical_requirement(8, 0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(classical_requirement(8, 1, 1.0), std::invalid_argument);

  ClassicalRequirement tight = classical_requirement(8, 4, 1.0 / 1024.0);
  CHECK(tight.k1 > 8.0);
  CHECK_FALSE(tight.feasible);

  // empirical validation at toy size: requirement met implies error at most
  // the predicted eps (k1 = k2 = 5 corresponds to eps = 1/2 at N = 6, m = 1)
  CHECK(exact_error(6, 1, 5, 5) <= 0.5);
}

TEST_CASE("markov_lift") {
  LiftedParams a = markov_lift(ExtractorParams(100, 100, 2, 10, 10,
                                               std::exp2(-42.0)));
  CHECK(a.eps == doctest::Approx(std::sqrt(3.0) * std::exp2(-21.0))
                     .epsilon(1e-14));
  CHECK(a.feasible);

  LiftedParams b = markov_lift(ExtractorParams(100, 100, 2, 10, 10,
                                               std::exp2(-40.0)));
  CHECK(b.k1 == doctest::Approx(50.0).epsilon(1e-14));

  // m = 2 leaves the error at sqrt(3 eps): exponent zero
  LiftedParams c = markov_lift(ExtractorParams(100, 100, 2, 10, 10, 1e-6));
  CHECK(c.eps == doctest::Approx(std::sqrt(3e-6)).epsilon(1e-14));

  LiftedParams fail = markov_lift(ExtractorParams(100, 100, 50, 10, 10, 0.25));
  CHECK_FALSE(fail.feasible);
}

TEST_CASE("smooth_requirement") {
  LiftedParams lifted{100.0, 80.0, std::exp2(-20.0), -20.0, true};
  SmoothRequirement r = smooth_requirement(lifted, 0.0);
  CHECK(r.k1_req == doctest::Approx(121.0).epsilon(1e-14));
  CHECK(r.k2_req == doctest::Approx(101.0).epsilon(1e-14));
  CHECK(r.final_error == doctest::Approx(6.0 * std::exp2(-20.0)).epsilon(1e-14));

  LiftedParams tiny{10.0, 10.0, 1e-8, std::log2(1e-8), true};
  CHECK(smooth_requirement(tiny, 1e-8).final_error ==
        doctest::Approx(1.2e-7).epsilon(1e-12));
}

TEST_CASE("lift chain is monotone in eps and never shrinks parameters") {
  double prev_k = 0.0;
  for (double eps : {1e-4, 1e-6, 1e-8, 1e-10}) {
    LiftedParams lifted = markov_lift(ExtractorParams(1000, 1000, 8, 100, 100, eps));
    CHECK(lifted.k1 >= prev_k);  // decreasing eps raises thresholds
    CHECK(lifted.k1 >= 100.0);
    CHECK(lifted.eps >= eps);  // the lift costs error, never gains
    prev_k = lifted.k1;
    SmoothRequirement req = smooth_requirement(lifted, 1e-9);
    CHECK(req.k1_req >= lifted.k1);
  }
}

TEST_CASE("output_length basics and linear growth") {
  MdlParams params(0.25, 0.25);
  CHECK(output_length(1000, 0.0, 2000, params, 1e-6, 1e-6) == 0);
  CHECK(output_length(1000, -0.3, 2000, params, 1e-6, 1e-6) == 0);

  // huge budgets: eta = 1, mu_max = 1/4, d = 2n
  std::int64_t n = 1'000'000;
  std::int64_t m = output_length(n, 1.0, 2 * n, params, std::exp2(-64.0),
                                 std::exp2(-64.0));
  CHECK(m >= n / 2);  // grows linearly in n under the sum rule
  std::int64_t m_half = output_length(n / 2, 1.0, n, params, std::exp2(-64.0),
                                      std::exp2(-64.0));
  CHECK(m_half >= n / 4);
  CHECK(m > m_half);
}

TEST_CASE("output_length boundary agrees with a linear scan") {
  MdlParams params(0.2, 0.3);
  for (std::int64_t n : {40, 64, 100, 150}) {
    for (double eta : {0.3, 0.55, 0.8, 0.99}) {
      std::int64_t d = 2 * n;
      double eps = 1e-3;
      std::int64_t solver = output_length(n, eta, d, params, eps, 1e-4);

      std::int64_t N = std::max(2 * n, d);
      double device_budget = 2.0 * static_cast<double>(n) * eta;
      double seed_budget = seed_min_entropy(d, params);
      std::int64_t scan = 0;
      for (std::int64_t m = 1; m <= N; ++m) {
        ClassicalRequirement cr = classical_requirement(N, m, eps);
        if (!cr.feasible) break;
        LiftedParams lifted =
            markov_lift(ExtractorParams(N, N, m, cr.k1, cr.k2, eps));
        SmoothRequirement req = smooth_requirement(lifted, 1e-4);
        if (req.k1_req <= device_budget && req.k2_req <= seed_budget)
          scan = m;
        else
          break;
      }
      CHECK(solver == scan);
    }
  }
}

TEST_CASE("output_length is monotone in n, eta, and d up to d = 2n") {
  MdlParams params(0.25, 0.25);
  double eps = 1e-4;
  std::int64_t base = output_length(1000, 0.8, 1000, params, eps, eps);
  CHECK(output_length(2000, 0.8, 2000, params, eps, eps) >= base);
  CHECK(output_length(1000, 0.9, 1000, params, eps, eps) >= base);
  CHECK(output_length(1000, 0.8, 1500, params, eps, eps) >= base);
  CHECK(output_length(1000, 0.8, 2000, params, eps, eps) >= base);

  // Past d = 2n the padding inflates the requirement (it scales with
  // max(2n, d)) while the device-side budget stays put, so m collapses.
  CHECK(output_length(1000, 0.8, 4000, params, eps, eps) == 0);
}

namespace {

// Fully independent reimplementation of the worst-case strong distance:
// same documented family and summation order, separately coded arithmetic.
double exact_error_independent(int n_bits, int m, int k1, int k2) {
  const std::uint32_t universe = 1u << n_bits;
  const std::uint32_t outcomes = 1u << m;

  auto conv_value = [&](std::uint32_t xv, std::uint32_t zv) {
    std::uint32_t packed = 0;
    for (int j = 0; j < m; ++j) {
      int bit = 0;
      for (int i = 0; i < n_bits; ++i) {
        int zi = ((j - i) % n_bits + n_bits) % n_bits;
        bit ^= static_cast<int>((xv >> i) & 1u) &
               static_cast<int>((zv >> zi) & 1u);
      }
      packed |= static_cast<std::uint32_t>(bit) << j;
    }
    return packed;
  };

  auto familyX = exact_error_family(n_bits, k1);
  auto familyZ = exact_error_family(n_bits, k2);

  double worst = 0.0;
  for (const auto& sx : familyX) {
    std::vector<double> per_z(universe, 0.0);
    for (std::uint32_t zv = 0; zv < universe; ++zv) {
      std::vector<std::uint32_t> hist(outcomes, 0);
      for (std::uint32_t xv : sx) ++hist[conv_value(xv, zv)];
      double dist = 0.0;
      for (std::uint32_t out = 0; out < outcomes; ++out)
        dist += std::abs(static_cast<double>(hist[out]) /
                             static_cast<double>(sx.size()) -
                         1.0 / static_cast<double>(outcomes));
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

}  // namespace

TEST_CASE("exact_error degenerate cases") {
  // seed pinned to the all-zeros string: output constant, distance 1 - 2^-m
  CHECK(exact_error(4, 1, 4, 0) == 0.5);
  CHECK(exact_error(4, 2, 4, 0) == 0.75);

  // both sources fully uniform: only the z = 0 atom contributes, with
  // weight 2^-N and per-atom distance 1 - 2^-m
  double full = exact_error(4, 1, 4, 4);
  CHECK(full == 0.5 / 16.0);
  CHECK(full <= std::exp2(-4.0));
  CHECK(exact_error(6, 1, 6, 6) == 0.5 / 64.0);
}

TEST_CASE("exact_error matches an independently coded enumeration") {
  for (int k1 : {0, 2, 4})
    for (int k2 : {0, 2, 4})
      CHECK(exact_error(4, 1, k1, k2) == exact_error_independent(4, 1, k1, k2));
  CHECK(exact_error(4, 2, 3, 3) == exact_error_independent(4, 2, 3, 3));
  CHECK(exact_error(5, 2, 4, 3) == exact_error_independent(5, 2, 4, 3));
}

TEST_CASE("exact_error rejects oversized instances") {
  CHECK_THROWS_AS(exact_error(9, 1, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(exact_error(4, 0, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(exact_error_family(4, 5), std::invalid_argument);
}
