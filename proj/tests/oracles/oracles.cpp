#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace oracle {
namespace {

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix kron_chain(const std::vector<Eigen::Matrix2cd>& factors) {
  Matrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    Matrix next = Eigen::kroneckerProduct(out, factors[i]).eval();
    out = std::move(next);
  }
  return out;
}

int bit_of(std::uint32_t word, int party, int n) { return (word >> (n - party)) & 1u; }

}  // namespace

std::vector<PartyProjectors> projector_sets(const mlocal::MeasurementAngles& angles) {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  std::vector<PartyProjectors> out(angles.theta_a.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t[2] = {angles.theta_a[k], angles.theta_b[k]};
    for (int s = 0; s < 2; ++s) {
      out[k].p[s][0] = 0.5 * (id + std::sin(t[s]) * pauli_x() + std::cos(t[s]) * pauli_z());
      out[k].p[s][1] = id - out[k].p[s][0];
    }
  }
  return out;
}

Matrix noisy_density(const mlocal::StateVector& psi, double p) {
  const auto amps = psi.amplitudes();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  const auto dim = static_cast<Eigen::Index>(amps.size());
  return p * (v * v.adjoint()) +
         (1.0 - p) / static_cast<double>(dim) * Matrix::Identity(dim, dim);
}

double dense_density_oracle(const mlocal::BellExpression& expr, const Matrix& rho,
                            const std::vector<PartyProjectors>& projectors) {
  const int n = expr.n;
  if (n > 8) throw std::invalid_argument("dense oracle limited to n <= 8");
  if (rho.rows() != (Eigen::Index{1} << n) || static_cast<int>(projectors.size()) != n) {
    throw std::invalid_argument("dense oracle dimension mismatch");
  }
  double total = 0.0;
  for (const auto& term : expr.terms) {
    std::vector<Eigen::Matrix2cd> factors;
    for (int k = 0; k < n; ++k) {
      const int s = term.settings[k] == mlocal::Setting::A ? 0 : 1;
      const int o = term.outcomes[k] == mlocal::Outcome::Zero ? 0 : 1;
      factors.push_back(projectors[k].p[s][o]);
    }
    total += term.coefficient * (rho * kron_chain(factors)).trace().real();
  }
  return total;
}

mlocal::ConditionalDistribution dense_behavior(const Matrix& rho,
                                               const std::vector<PartyProjectors>& projectors) {
  const int n = static_cast<int>(projectors.size());
  const std::uint32_t rows = 1u << n;
  std::vector<double> table(static_cast<std::size_t>(rows) * rows);
  for (std::uint32_t s = 0; s < rows; ++s) {
    for (std::uint32_t o = 0; o < rows; ++o) {
      std::vector<Eigen::Matrix2cd> factors;
      for (int k = 1; k <= n; ++k) {
        factors.push_back(projectors[k - 1].p[bit_of(s, k, n)][bit_of(o, k, n)]);
      }
      table[static_cast<std::size_t>(s) * rows + o] = (rho * kron_chain(factors)).trace().real();
    }
  }
  std::vector<int> parties(n);
  for (int k = 0; k < n; ++k) parties[k] = k + 1;
  return mlocal::ConditionalDistribution(std::move(parties), std::move(table));
}

double symmetric_grid_max(const mlocal::BellExpression& expr, const mlocal::StateVector& psi,
                          double p, int resolution) {
  const int n = expr.n;
  const auto amps = psi.amplitudes();
  const std::size_t half = amps.size() / 2;
  std::vector<double> grid(resolution), sin_g(resolution), cos_g(resolution);
  for (int i = 0; i < resolution; ++i) {
    grid[i] = 2.0 * std::numbers::pi * i / resolution;
    sin_g[i] = std::sin(grid[i]);
    cos_g[i] = std::cos(grid[i]);
  }
  double noise = 0.0;
  for (const auto& t : expr.terms) noise += t.coefficient;
  noise *= (1.0 - p) / static_cast<double>(amps.size());

  double best = -1e300;
  std::vector<double> rest(half);
  for (int ia = 0; ia < resolution; ++ia) {
    for (int ib = 0; ib < resolution; ++ib) {
      // F_s(theta) = alpha_s + beta_s sin(theta) + gamma_s cos(theta) for party 1's setting s.
      double alpha[2] = {0, 0}, beta[2] = {0, 0}, gamma[2] = {0, 0};
      for (const auto& term : expr.terms) {
        // Product vector of parties 2..n, amplitude for every basis string of those parties.
        for (std::size_t j = 0; j < half; ++j) {
          double w = 1.0;
          for (int k = 2; k <= n; ++k) {
            const int s = term.settings[k - 1] == mlocal::Setting::A ? 0 : 1;
            const double theta = s == 0 ? grid[ia] : grid[ib];
            const int o = term.outcomes[k - 1] == mlocal::Outcome::Zero ? 0 : 1;
            const int b = static_cast<int>((j >> (n - k)) & 1u);
            const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
            const double comp = o == 0 ? (b == 0 ? c : sn) : (b == 0 ? -sn : c);
            w *= comp;
          }
          rest[j] = w;
        }
        std::complex<double> w0 = 0.0, w1 = 0.0;
        for (std::size_t j = 0; j < half; ++j) {
          w0 += rest[j] * amps[j];
          w1 += rest[j] * amps[half + j];
        }
        // rho_1 = w w^dagger; Tr(P_o rho_1) = (tr + sign (sin t rho_X + cos t rho_Z)) / 2.
        const double tr = std::norm(w0) + std::norm(w1);
        const double rx = 2.0 * (std::conj(w0) * w1).real();
        const double rz = std::norm(w0) - std::norm(w1);
        const int s1 = term.settings[0] == mlocal::Setting::A ? 0 : 1;
        const double sign = term.outcomes[0] == mlocal::Outcome::Zero ? 1.0 : -1.0;
        alpha[s1] += term.coefficient * p * tr / 2;
        beta[s1] += term.coefficient * p * sign * rx / 2;
        gamma[s1] += term.coefficient * p * sign * rz / 2;
      }
      double value = noise;
      for (int s = 0; s < 2; ++s) {
        double m = -1e300;
        for (int i = 0; i < resolution; ++i) {
          m = std::max(m, alpha[s] + beta[s] * sin_g[i] + gamma[s] * cos_g[i]);
        }
        value += m;
      }
      best = std::max(best, value);
    }
  }
  return best;
}

std::uint64_t stirling2(int n, int m) {
  std::vector<std::vector<std::uint64_t>> s(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= i; ++j) s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
  }
  return (m >= 0 && m <= n) ? s[n][m] : 0;
}

int brute_force_strategy_lhs(const mlocal::BellExpression& expr,
                             const mlocal::DeterministicStrategy& strategy) {
  int total = 0;
  for (const auto& term : expr.terms) {
    bool match = true;
    for (int k = 1; k <= expr.n && match; ++k) {
      match = strategy.response(k, term.settings[k - 1]) == term.outcomes[k - 1];
    }
    if (match) total += term.coefficient;
  }
  return total;
}

std::vector<mlocal::ConditionalDistribution> bipartite_local_boxes() {
  std::vector<mlocal::ConditionalDistribution> out;
  for (const auto s : mlocal::enumerate_strategies(2)) out.push_back(mlocal::indicator_distribution(s));
  return out;
}

std::vector<mlocal::ConditionalDistribution> pr_boxes() {
  // P(r1 r2 | x y) = 1/2 iff r1 xor r2 = x y xor alpha x xor beta y xor gamma.
  std::vector<mlocal::ConditionalDistribution> out;
  for (int alpha = 0; alpha < 2; ++alpha) {
    for (int beta = 0; beta < 2; ++beta) {
      for (int gamma = 0; gamma < 2; ++gamma) {
        std::vector<double> table(16, 0.0);
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) {
            for (int r1 = 0; r1 < 2; ++r1) {
              for (int r2 = 0; r2 < 2; ++r2) {
                if ((r1 ^ r2) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma)) {
                  table[(x * 2 + y) * 4 + (r1 * 2 + r2)] = 0.5;
                }
              }
            }
          }
        }
        out.emplace_back(std::vector<int>{1, 2}, std::move(table));
      }
    }
  }
  return out;
}

double max_abs_difference(const mlocal::ConditionalDistribution& a,
                          const mlocal::ConditionalDistribution& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.table().size(); ++i) {
    worst = std::max(worst, std::abs(a.table()[i] - b.table()[i]));
  }
  return worst;
}

}  // namespace oracle
