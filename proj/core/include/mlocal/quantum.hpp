#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "mlocal/behavior.hpp"
#include "mlocal/inequality.hpp"

namespace mlocal {

using Amplitude = std::complex<double>;

/// Normalized pure state of n qubits. Party 1 is the most significant bit of
/// the computational-basis index.
class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws DimensionMismatch if the length is not 2^n and DomainError if the
  /// norm deviates from 1 by more than kNormTolerance.
  StateVector(int n, std::vector<Amplitude> amplitudes);

  [[nodiscard]] int parties() const { return n_; }
  [[nodiscard]] std::size_t dimension() const { return amplitudes_.size(); }
  [[nodiscard]] std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  /// Basis indices with nonzero amplitude, ascending.
  [[nodiscard]] std::span<const std::size_t> support() const { return support_; }

 private:
  int n_;
  std::vector<Amplitude> amplitudes_;
  std::vector<std::size_t> support_;
};

/// p |psi><psi| + (1 - p) 1/2^n.
struct NoisyState {
  NoisyState(StateVector state, double visibility);

  StateVector psi;
  double p;

  [[nodiscard]] int parties() const { return psi.parties(); }
};

enum class StateFamily { GHZ, W };

StateVector ghz_state(int n);
StateVector w_state(int n);
StateVector make_state(StateFamily family, int n);

/// Polar angles (radians) of the A and B settings of every party, all in the X-Z plane.
struct MeasurementAngles {
  std::vector<double> theta_a;
  std::vector<double> theta_b;

  [[nodiscard]] int parties() const { return static_cast<int>(theta_a.size()); }
  /// Same settings with every angle reduced to [0, 2pi).
  [[nodiscard]] MeasurementAngles normalized() const;
};

double normalize_angle(double theta);

/// cos(theta/2)|0> + sin(theta/2)|1>, Bloch vector (sin theta, 0, cos theta).
std::array<double, 2> setting_vector(double theta);

/// Tr(rho Pi) for the product projector selected by `term`: outcome 0 projects on
/// the setting vector, outcome 1 on its orthogonal complement.
double term_probability(const NoisyState& state, const Term& term,
                        const MeasurementAngles& angles);

/// An expression bound to a state for repeated evaluation at many settings.
class LhsEvaluator {
 public:
  /// Throws DimensionMismatch if the expression and state disagree on n.
  LhsEvaluator(const BellExpression& expr, NoisyState state);

  [[nodiscard]] int parties() const { return state_.parties(); }
  [[nodiscard]] double operator()(std::span<const double> theta_a,
                                  std::span<const double> theta_b) const;
  [[nodiscard]] double operator()(const MeasurementAngles& angles) const {
    return (*this)(angles.theta_a, angles.theta_b);
  }

 private:
  NoisyState state_;
  std::vector<std::uint32_t> settings_;
  std::vector<std::uint32_t> outcomes_;
  std::vector<int> coefficients_;
};

/// Left-hand side of the inequality on the state; positive means violation.
double evaluate_lhs(const BellExpression& expr, const NoisyState& state,
                    const MeasurementAngles& angles);

/// The full n-party behavior P(r|M) generated by measuring the state.
ConditionalDistribution quantum_behavior(const NoisyState& state,
                                         const MeasurementAngles& angles);

}  // namespace mlocal
