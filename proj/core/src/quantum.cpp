#include "mlocal/quantum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mlocal/errors.hpp"

namespace mlocal {
namespace {

constexpr int kMaxQubits = 24;

void require_qubits(int n) {
  if (n < 2 || n > kMaxQubits) {
    throw DomainError("qubit count n=" + std::to_string(n) + " outside [2, " +
                      std::to_string(kMaxQubits) + "]");
  }
}

// Local basis vectors of one party: [setting][outcome] -> (<0|v>, <1|v>).
using LocalVectors = std::array<std::array<std::array<double, 2>, 2>, 2>;

LocalVectors local_vectors(double theta_a, double theta_b) {
  LocalVectors v{};
  const double thetas[2] = {theta_a, theta_b};
  for (int s = 0; s < 2; ++s) {
    const double c = std::cos(thetas[s] / 2.0);
    const double sn = std::sin(thetas[s] / 2.0);
    v[s][0] = {c, sn};
    v[s][1] = {-sn, c};
  }
  return v;
}

void require_angles(std::span<const double> theta_a, std::span<const double> theta_b, int n) {
  if (static_cast<int>(theta_a.size()) != n || static_cast<int>(theta_b.size()) != n) {
    throw DimensionMismatch("angle arrays cover " + std::to_string(theta_a.size()) + "/" +
                            std::to_string(theta_b.size()) + " parties, state has " +
                            std::to_string(n));
  }
  for (int k = 0; k < n; ++k) {
    if (!std::isfinite(theta_a[k]) || !std::isfinite(theta_b[k])) {
      throw DomainError("measurement angles must be finite");
    }
  }
}

void require_angles(const MeasurementAngles& angles, int n) {
  require_angles(angles.theta_a, angles.theta_b, n);
}

// <v|psi> for the product vector v = (x)_k locals[k][settings_k][outcomes_k].
Amplitude product_overlap(const StateVector& psi, std::span<const LocalVectors> locals,
                          std::uint32_t settings, std::uint32_t outcomes) {
  const int n = psi.parties();
  const auto amps = psi.amplitudes();
  const auto support = psi.support();

  if (support.size() * static_cast<std::size_t>(n) < 2 * psi.dimension()) {
    Amplitude acc{0.0, 0.0};
    for (std::size_t index : support) {
      double weight = 1.0;
      for (int k = 0; k < n && weight != 0.0; ++k) {
        const int shift = n - 1 - k;
        const int s = (settings >> shift) & 1u;
        const int o = (outcomes >> shift) & 1u;
        weight *= locals[k][s][o][(index >> shift) & 1u];
      }
      acc += weight * amps[index];
    }
    return acc;
  }

  // Dense contraction: fold the least significant party first.
  std::vector<Amplitude> work(amps.begin(), amps.end());
  std::size_t len = work.size();
  for (int k = n - 1; k >= 0; --k) {
    const int shift = n - 1 - k;
    const auto& v = locals[k][(settings >> shift) & 1u][(outcomes >> shift) & 1u];
    len /= 2;
    for (std::size_t j = 0; j < len; ++j) {
      work[j] = v[0] * work[2 * j] + v[1] * work[2 * j + 1];
    }
  }
  return work[0];
}

std::array<LocalVectors, kMaxQubits> all_local_vectors(std::span<const double> theta_a,
                                                       std::span<const double> theta_b) {
  std::array<LocalVectors, kMaxQubits> locals{};
  for (std::size_t k = 0; k < theta_a.size(); ++k) {
    locals[k] = local_vectors(theta_a[k], theta_b[k]);
  }
  return locals;
}

std::array<LocalVectors, kMaxQubits> all_local_vectors(const MeasurementAngles& angles) {
  return all_local_vectors(angles.theta_a, angles.theta_b);
}

double noisy_probability(const NoisyState& state, std::span<const LocalVectors> locals,
                         std::uint32_t settings, std::uint32_t outcomes) {
  const double pure = std::norm(product_overlap(state.psi, locals, settings, outcomes));
  return state.p * pure + (1.0 - state.p) / static_cast<double>(state.psi.dimension());
}

}  // namespace

StateVector::StateVector(int n, std::vector<Amplitude> amplitudes)
    : n_(n), amplitudes_(std::move(amplitudes)) {
  require_qubits(n);
  if (amplitudes_.size() != (std::size_t{1} << n)) {
    throw DimensionMismatch("state of " + std::to_string(n) + " qubits needs " +
                            std::to_string(std::size_t{1} << n) + " amplitudes, got " +
                            std::to_string(amplitudes_.size()));
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    const double w = std::norm(amplitudes_[i]);
    norm += w;
    if (w != 0.0) support_.push_back(i);
  }
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw DomainError("state norm^2 = " + std::to_string(norm) + " is not 1");
  }
}

NoisyState::NoisyState(StateVector state, double visibility)
    : psi(std::move(state)), p(visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw DomainError("visibility p=" + std::to_string(visibility) + " outside [0, 1]");
  }
}

StateVector ghz_state(int n) {
  require_qubits(n);
  std::vector<Amplitude> amps(std::size_t{1} << n);
  amps.front() = amps.back() = std::numbers::sqrt2 / 2.0;
  return StateVector(n, std::move(amps));
}

StateVector w_state(int n) {
  require_qubits(n);
  std::vector<Amplitude> amps(std::size_t{1} << n);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) amps[std::size_t{1} << k] = a;
  return StateVector(n, std::move(amps));
}

StateVector make_state(StateFamily family, int n) {
  return family == StateFamily::GHZ ? ghz_state(n) : w_state(n);
}

double normalize_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

MeasurementAngles MeasurementAngles::normalized() const {
  MeasurementAngles out = *this;
  for (double& t : out.theta_a) t = normalize_angle(t);
  for (double& t : out.theta_b) t = normalize_angle(t);
  return out;
}

std::array<double, 2> setting_vector(double theta) {
  return {std::cos(theta / 2.0), std::sin(theta / 2.0)};
}

double term_probability(const NoisyState& state, const Term& term,
                        const MeasurementAngles& angles) {
  const int n = state.parties();
  if (term.parties() != n || static_cast<int>(term.outcomes.size()) != n) {
    throw DimensionMismatch("term covers " + std::to_string(term.parties()) +
                            " parties, state has " + std::to_string(n));
  }
  require_angles(angles, n);
  const auto locals = all_local_vectors(angles);
  return noisy_probability(state, std::span<const LocalVectors>(locals.data(), n),
                           term.setting_mask(), term.outcome_mask());
}

LhsEvaluator::LhsEvaluator(const BellExpression& expr, NoisyState state)
    : state_(std::move(state)) {
  if (expr.n != state_.parties()) {
    throw DimensionMismatch("expression has n=" + std::to_string(expr.n) + ", state has n=" +
                            std::to_string(state_.parties()));
  }
  for (const Term& t : expr.terms) {
    if (t.parties() != expr.n) throw DimensionMismatch("term length differs from n");
    settings_.push_back(t.setting_mask());
    outcomes_.push_back(t.outcome_mask());
    coefficients_.push_back(t.coefficient);
  }
}

double LhsEvaluator::operator()(std::span<const double> theta_a,
                                std::span<const double> theta_b) const {
  const int n = state_.parties();
  require_angles(theta_a, theta_b, n);
  const auto locals = all_local_vectors(theta_a, theta_b);
  const std::span<const LocalVectors> view(locals.data(), static_cast<std::size_t>(n));
  double lhs = 0.0;
  for (std::size_t t = 0; t < settings_.size(); ++t) {
    lhs += coefficients_[t] * noisy_probability(state_, view, settings_[t], outcomes_[t]);
  }
  return lhs;
}

double evaluate_lhs(const BellExpression& expr, const NoisyState& state,
                    const MeasurementAngles& angles) {
  return LhsEvaluator(expr, state)(angles);
}

ConditionalDistribution quantum_behavior(const NoisyState& state,
                                         const MeasurementAngles& angles) {
  const int n = state.parties();
  require_angles(angles, n);
  if (n > 12) throw DomainError("behavior table limited to n <= 12");
  const auto locals = all_local_vectors(angles);
  std::vector<int> parties(n);
  for (int k = 0; k < n; ++k) parties[k] = k + 1;
  const std::uint32_t rows = 1u << n;
  std::vector<double> table(static_cast<std::size_t>(rows) * rows);
  for (std::uint32_t s = 0; s < rows; ++s) {
    for (std::uint32_t o = 0; o < rows; ++o) {
      table[static_cast<std::size_t>(s) * rows + o] =
          noisy_probability(state, std::span<const LocalVectors>(locals.data(), n), s, o);
    }
  }
  return ConditionalDistribution(std::move(parties), std::move(table));
}

}  // namespace mlocal
