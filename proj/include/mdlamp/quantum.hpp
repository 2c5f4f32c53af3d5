#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "mdlamp/sources.hpp"

namespace mdlamp {

using Matrix = Eigen::MatrixXcd;

/// Max |M - M^dagger| entry; Hermitian operators must stay below 1e-12.
double hermiticity_defect(const Matrix& m);

/// A validated density operator: Hermitian (1e-12), positive semidefinite
/// (eigenvalues >= -1e-10), unit trace (1e-10).
class DensityOperator {
 public:
  static DensityOperator make(Matrix m);
  static DensityOperator pure(const Eigen::VectorXcd& psi);
  static DensityOperator maximally_mixed(Eigen::Index dim);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  explicit DensityOperator(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Projective qubit measurement with outcomes {0, 1} mapped to {+1, -1}
/// along the direction cos(angle) Z + sin(angle) X.
struct Measurement {
  double angle = 0.0;
  Eigen::Matrix2cd projector(int outcome) const;
};

/// A two-qubit state plus one binary measurement per party per input.
struct QuantumStrategy {
  DensityOperator state;
  std::array<Measurement, 2> alice;
  std::array<Measurement, 2> bob;
};

/// The conditional table P(ab|xy) of a bipartite box.
class Behavior {
 public:
  /// Validates range (entries in [0,1] up to 1e-10 slack, then clamped) and
  /// per-(x,y) normalization (1e-10).
  static Behavior make(const std::array<double, 16>& p);
  static Behavior uniform();
  /// The box that always answers (a, b) regardless of inputs.
  static Behavior constant(int a, int b);

  double p(int a, int b, int x, int y) const {
    return p_[index(a, b, x, y)];
  }
  static constexpr int index(int a, int b, int x, int y) {
    return ((a * 2 + b) * 2 + x) * 2 + y;
  }

 private:
  std::array<double, 16> p_{};
};

/// Coefficients of a Bell functional. Conditional mode pairs with P(ab|xy)
/// directly; joint mode weighs each term by an input distribution.
struct BellCoefficients {
  enum class Mode { kConditional, kJoint };
  Mode mode = Mode::kConditional;
  std::array<double, 16> c{};

  double& at(int a, int b, int x, int y) {
    return c[Behavior::index(a, b, x, y)];
  }
  double get(int a, int b, int x, int y) const {
    return c[Behavior::index(a, b, x, y)];
  }

  double evaluate(const Behavior& b) const;  // conditional mode only
  double evaluate(const Behavior& b, const InputDistribution& inputs) const;

  static BellCoefficients chsh();
  static BellCoefficients eberhard();
  static BellCoefficients s_mu(const MdlParams& params);       // joint
  static BellCoefficients s_mu_tilde(const MdlParams& params); // conditional
};

/// P(ab|xy) = Tr[(P^a_x (x) P^b_y) rho]. Throws on an invalid state.
Behavior born_behavior(const QuantumStrategy& strategy);

/// CHSH value beta = sum (-1)^{a+b+xy} P(ab|xy); local bound 2, quantum
/// maximum 2*sqrt(2).
double chsh_beta(const Behavior& b);

/// Eberhard value alpha = P(00|00) - P(01|01) - P(10|10) - P(00|11); local
/// bound 0, quantum maximum (sqrt(2)-1)/2. For non-signalling behaviors
/// alpha = beta/4 - 1/2.
double eberhard_alpha(const Behavior& b);

/// MDL value S_mu = mu_min P(0000) - mu_max (P(0101) + P(1010) + P(0011))
/// over joint probabilities P(abxy) = P(ab|xy) inputs(xy). Nonpositive for
/// every MDL-local behavior. Throws if inputs violate the box.
double s_mu(const Behavior& b, const InputDistribution& inputs,
            const MdlParams& params);

/// Source-independent lower bound on S_mu:
/// mu_min^2 P(00|00) - mu_max^2 (P(01|01) + P(10|10) + P(00|11)).
double s_mu_tilde(const Behavior& b, const MdlParams& params);

/// Per-round score: mu_min on (0,0,0,0); -mu_max on (0,1,0,1), (1,0,1,0),
/// (0,0,1,1); 0 otherwise.
double winning_value(int a, int b, int x, int y, const MdlParams& params);

/// Vertices of {q in the simplex : mu_min <= q(xy) <= mu_max}, enumerated
/// exactly: three cells pinned to a bound pattern, the fourth normalized
/// (32 candidates, deduplicated).
std::vector<InputDistribution> input_box_vertices(const MdlParams& params);

/// Exact maximum of s_mu over the 16 deterministic local strategies and all
/// input distributions in the box. Always <= 0 (the MDL inequality).
double lhv_max_s_mu(const MdlParams& params);

/// Bell operator sum c(abxy) P^a_x (x) P^b_y for the given measurement
/// angles [A0, A1, B0, B1]; Hermitian within 1e-12.
Eigen::Matrix4cd bell_operator(const BellCoefficients& coeffs,
                               const std::array<Measurement, 4>& meas);

struct OptimizerConfig {
  int restarts = 32;
  int max_evaluations = 4000;  // per restart
  double tolerance = 1e-10;    // simplex diameter
  std::uint64_t seed = 0x5eedbe11;
};

struct OptimizeResult {
  double value;
  QuantumStrategy strategy;
  std::array<double, 4> angles;  // A0, A1, B0, B1
  bool converged;
  int best_restart;
};

/// Maximizes the top eigenvalue of the Bell operator over the four
/// measurement angles (Nelder-Mead with deterministic random restarts; on a
/// value tie the lowest restart index wins). The returned strategy carries
/// the top eigenvector as a pure state, so coefficient-functional(behavior)
/// equals `value` up to eigensolver accuracy.
OptimizeResult optimize_bell(const BellCoefficients& coeffs,
                             const OptimizerConfig& config = {});

/// optimize_bell on the s_mu_tilde coefficients: a source-independent lower
/// bound on the maximal quantum MDL violation for these params.
OptimizeResult optimize_s_tilde(const MdlParams& params,
                                const OptimizerConfig& config = {});

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// (1-q) rho + q I/dim.
DensityOperator depolarize(const DensityOperator& rho, double q);

}  // namespace mdlamp
