#include "mdlamp/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mdlamp/rng.hpp"
#include "nelder_mead.hpp"

namespace mdlamp {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kProbTol = 1e-10;

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

}  // namespace

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityOperator DensityOperator::make(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("DensityOperator: matrix must be square");
  if (!m.allFinite())
    throw std::invalid_argument("DensityOperator: non-finite entries");
  if (hermiticity_defect(m) > kHermTol)
    throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(m.trace().real() - 1.0) > kTraceTol ||
      std::abs(m.trace().imag()) > kTraceTol)
    throw std::invalid_argument("DensityOperator: trace must be 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("DensityOperator: not positive semidefinite");
  return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
  double norm = psi.norm();
  if (norm == 0.0)
    throw std::invalid_argument("DensityOperator::pure: zero vector");
  Eigen::VectorXcd v = psi / norm;
  return DensityOperator(v * v.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index dim) {
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Eigen::Matrix2cd Measurement::projector(int outcome) const {
  // observable cos(t) Z + sin(t) X; projector (I +/- observable) / 2
  double c = std::cos(angle), s = std::sin(angle);
  double sign = (outcome == 0) ? 1.0 : -1.0;
  Eigen::Matrix2cd p;
  p << 0.5 * (1.0 + sign * c), 0.5 * sign * s,
       0.5 * sign * s,         0.5 * (1.0 - sign * c);
  return p;
}

Behavior Behavior::make(const std::array<double, 16>& p) {
  Behavior b;
  for (int i = 0; i < 16; ++i) {
    double v = p[i];
    if (!(v >= -kProbTol && v <= 1.0 + kProbTol))
      throw std::invalid_argument("Behavior: entry outside [0, 1]");
    b.p_[i] = std::clamp(v, 0.0, 1.0);
  }
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double sum = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) sum += b.p(a, bb, x, y);
      if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument("Behavior: column (x,y) not normalized");
    }
  return b;
}

Behavior Behavior::uniform() {
  std::array<double, 16> p;
  p.fill(0.25);
  return make(p);
}

Behavior Behavior::constant(int a, int b) {
  std::array<double, 16> p{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) p[index(a & 1, b & 1, x, y)] = 1.0;
  return make(p);
}

double BellCoefficients::evaluate(const Behavior& b) const {
  if (mode != Mode::kConditional)
    throw std::invalid_argument(
        "BellCoefficients: joint-mode functional needs an input distribution");
  double sum = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int bb = 0; bb < 2; ++bb)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          sum += get(a, bb, x, y) * b.p(a, bb, x, y);
  return sum;
}

double BellCoefficients::evaluate(const Behavior& b,
                                  const InputDistribution& inputs) const {
  double sum = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int bb = 0; bb < 2; ++bb)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          double w = (mode == Mode::kJoint) ? inputs(x, y) : 1.0;
          sum += get(a, bb, x, y) * b.p(a, bb, x, y) * w;
        }
  return sum;
}

BellCoefficients BellCoefficients::chsh() {
  BellCoefficients f;
  f.mode = Mode::kConditional;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          f.at(a, b, x, y) = ((a + b + x * y) % 2 == 0) ? 1.0 : -1.0;
  return f;
}

BellCoefficients BellCoefficients::eberhard() {
  BellCoefficients f;
  f.mode = Mode::kConditional;
  f.at(0, 0, 0, 0) = 1.0;
  f.at(0, 1, 0, 1) = -1.0;
  f.at(1, 0, 1, 0) = -1.0;
  f.at(0, 0, 1, 1) = -1.0;
  return f;
}

BellCoefficients BellCoefficients::s_mu(const MdlParams& params) {
  BellCoefficients f;
  f.mode = Mode::kJoint;
  f.at(0, 0, 0, 0) = params.mu_min;
  f.at(0, 1, 0, 1) = -params.mu_max;
  f.at(1, 0, 1, 0) = -params.mu_max;
  f.at(0, 0, 1, 1) = -params.mu_max;
  return f;
}

BellCoefficients BellCoefficients::s_mu_tilde(const MdlParams& params) {
  BellCoefficients f;
  f.mode = Mode::kConditional;
  f.at(0, 0, 0, 0) = params.mu_min * params.mu_min;
  f.at(0, 1, 0, 1) = -params.mu_max * params.mu_max;
  f.at(1, 0, 1, 0) = -params.mu_max * params.mu_max;
  f.at(0, 0, 1, 1) = -params.mu_max * params.mu_max;
  return f;
}

Behavior born_behavior(const QuantumStrategy& strategy) {
  if (strategy.state.dim() != 4)
    throw std::invalid_argument("born_behavior: state must be two-qubit");
  std::array<double, 16> p{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          Eigen::Matrix4cd joint = kron2(strategy.alice[x].projector(a),
                                         strategy.bob[y].projector(b));
          p[Behavior::index(a, b, x, y)] =
              (joint * strategy.state.matrix()).trace().real();
        }
  return Behavior::make(p);
}

double chsh_beta(const Behavior& b) {
  return BellCoefficients::chsh().evaluate(b);
}

double eberhard_alpha(const Behavior& b) {
  return BellCoefficients::eberhard().evaluate(b);
}

double s_mu(const Behavior& b, const InputDistribution& inputs,
            const MdlParams& params) {
  inputs.validate_in_box(params);
  return BellCoefficients::s_mu(params).evaluate(b, inputs);
}

double s_mu_tilde(const Behavior& b, const MdlParams& params) {
  return BellCoefficients::s_mu_tilde(params).evaluate(b);
}

double winning_value(int a, int b, int x, int y, const MdlParams& params) {
  if ((a | b | x | y) < 0 || a > 1 || b > 1 || x > 1 || y > 1)
    throw std::invalid_argument("winning_value: arguments must be bits");
  if (a == 0 && b == 0 && x == 0 && y == 0) return params.mu_min;
  if (a == 0 && b == 1 && x == 0 && y == 1) return -params.mu_max;
  if (a == 1 && b == 0 && x == 1 && y == 0) return -params.mu_max;
  if (a == 0 && b == 0 && x == 1 && y == 1) return -params.mu_max;
  return 0.0;
}

std::vector<InputDistribution> input_box_vertices(const MdlParams& params) {
  // Every vertex of the box intersected with the simplex has at most one
  // cell strictly between the bounds, so pinning three cells to a bound
  // pattern and normalizing the fourth enumerates all of them exactly
  // (4 free cells x 8 patterns = 32 candidates). Pinned cells carry the
  // bound values verbatim and the free cell is always recomputed as one
  // minus the others in index order, so the same vertex compares bitwise
  // equal whichever pattern produced it.
  std::vector<InputDistribution> verts;
  for (int free = 0; free < 4; ++free)
    for (int pattern = 0; pattern < 8; ++pattern) {
      InputDistribution q;
      int bit = 0;
      for (int cell = 0; cell < 4; ++cell) {
        if (cell == free) continue;
        q.p[cell] = ((pattern >> bit++) & 1) ? params.mu_max : params.mu_min;
      }
      double others = 0.0;
      for (int cell = 0; cell < 4; ++cell)
        if (cell != free) others += q.p[cell];
      q.p[free] = 1.0 - others;
      if (!(q.p[free] >= params.mu_min && q.p[free] <= params.mu_max))
        continue;
      bool dup = false;
      for (const auto& v : verts)
        if (v.p == q.p) {
          dup = true;
          break;
        }
      if (!dup) verts.push_back(q);
    }
  return verts;
}

double lhv_max_s_mu(const MdlParams& params) {
  std::vector<InputDistribution> verts = input_box_vertices(params);
  double best = -std::numeric_limits<double>::infinity();
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int b0 = 0; b0 < 2; ++b0)
        for (int b1 = 0; b1 < 2; ++b1) {
          std::array<double, 4> w;  // score per input cell, canonical order
          const int a_of[2] = {a0, a1}, b_of[2] = {b0, b1};
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
              w[(x << 1) | y] = winning_value(a_of[x], b_of[y], x, y, params);
          for (const auto& q : verts) {
            double v = q.p[0] * w[0] + q.p[1] * w[1] + q.p[2] * w[2] +
                       q.p[3] * w[3];
            best = std::max(best, v);
          }
        }
  return best;
}

Eigen::Matrix4cd bell_operator(const BellCoefficients& coeffs,
                               const std::array<Measurement, 4>& meas) {
  for (double v : coeffs.c)
    if (!std::isfinite(v))
      throw std::invalid_argument("bell_operator: non-finite coefficient");
  Eigen::Matrix4cd op = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          double c = coeffs.get(a, b, x, y);
          if (c == 0.0) continue;
          op += c * kron2(meas[x].projector(a), meas[2 + y].projector(b));
        }
  return op;
}

namespace {

std::array<Measurement, 4> to_measurements(const std::vector<double>& angles) {
  return {Measurement{angles[0]}, Measurement{angles[1]},
          Measurement{angles[2]}, Measurement{angles[3]}};
}

double top_eigenvalue(const Eigen::Matrix4cd& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(op, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

OptimizeResult optimize_bell(const BellCoefficients& coeffs,
                             const OptimizerConfig& config) {
  if (config.restarts < 1)
    throw std::invalid_argument("optimize_bell: need at least one restart");
  auto objective = [&](const std::vector<double>& angles) {
    return top_eigenvalue(bell_operator(coeffs, to_measurements(angles)));
  };

  CounterRng rng(config.seed);
  detail::NelderMeadResult best;
  best.value = -std::numeric_limits<double>::infinity();
  int best_restart = -1;

  for (int r = 0; r < config.restarts; ++r) {
    std::vector<double> x0(4);
    for (int k = 0; k < 4; ++k)
      x0[k] = (rng.uniform(static_cast<std::uint64_t>(r), k) - 0.5) * 2.0 *
              std::numbers::pi;
    detail::NelderMeadResult res = detail::nelder_mead_maximize(
        objective, x0, 0.5, config.tolerance, config.max_evaluations);
    if (res.value > best.value) {  // ties keep the lowest restart index
      best = res;
      best_restart = r;
    }
  }

  Eigen::Matrix4cd op = bell_operator(coeffs, to_measurements(best.x));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(op);
  Eigen::Index top;
  es.eigenvalues().maxCoeff(&top);

  return OptimizeResult{
      es.eigenvalues()(top),
      QuantumStrategy{DensityOperator::pure(es.eigenvectors().col(top)),
                      {Measurement{best.x[0]}, Measurement{best.x[1]}},
                      {Measurement{best.x[2]}, Measurement{best.x[3]}}},
      {best.x[0], best.x[1], best.x[2], best.x[3]},
      best.converged,
      best_restart};
}

OptimizeResult optimize_s_tilde(const MdlParams& params,
                                const OptimizerConfig& config) {
  return optimize_bell(BellCoefficients::s_mu_tilde(params), config);
}

double trace_distance(const DensityOperator& rho,
                      const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix() - sigma.matrix(),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityOperator depolarize(const DensityOperator& rho, double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("depolarize: q must lie in [0, 1]");
  Matrix mixed =
      Matrix::Identity(rho.dim(), rho.dim()) / static_cast<double>(rho.dim());
  return DensityOperator::make((1.0 - q) * rho.matrix() + q * mixed);
}

}  // namespace mdlamp
