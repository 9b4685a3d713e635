#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <ranges>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlocal/behavior.hpp"
#include "mlocal/errors.hpp"
#include "mlocal/inequality.hpp"

namespace mlocal {

/// Largest n for which the 4^n deterministic strategies are enumerated.
inline constexpr int kMaxEnumerationParties = 12;
/// Tolerance used for nonsignaling checks and for the m-local bound.
inline constexpr double kBoundTolerance = 1e-9;

/// Local deterministic response function: every party answers each setting
/// with a fixed bit. Bit (n-1-k) of `on_a` / `on_b` is party k+1's answer.
struct DeterministicStrategy {
  int n = 0;
  std::uint32_t on_a = 0;
  std::uint32_t on_b = 0;

  /// Strategy number `index` in [0, 4^n): low n bits answer A, high n bits answer B.
  static DeterministicStrategy from_index(int n, std::uint64_t index) {
    const std::uint32_t mask = (1u << n) - 1u;
    return {n, static_cast<std::uint32_t>(index) & mask,
            static_cast<std::uint32_t>(index >> n) & mask};
  }

  /// Outcome bit of 1-based `party` under `setting`.
  [[nodiscard]] Outcome response(int party, Setting setting) const {
    const std::uint32_t word = setting == Setting::A ? on_a : on_b;
    return ((word >> (n - party)) & 1u) ? Outcome::One : Outcome::Zero;
  }

  /// Outcome string produced for the setting string `settings` (B bits set).
  [[nodiscard]] std::uint32_t outcomes_for(std::uint32_t settings) const {
    return (on_a & ~settings) | (on_b & settings);
  }

  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

/// Lazily generated view over all 4^n deterministic strategies.
inline auto enumerate_strategies(int n) {
  if (n < 1 || n > kMaxEnumerationParties) {
    throw DomainError("strategy enumeration requires 1 <= n <= " +
                      std::to_string(kMaxEnumerationParties) + ", got n=" + std::to_string(n));
  }
  const std::uint64_t total = std::uint64_t{1} << (2 * n);
  return std::views::iota(std::uint64_t{0}, total) |
         std::views::transform(
             [n](std::uint64_t i) { return DeterministicStrategy::from_index(n, i); });
}

/// Signed count of satisfied terms; exact integer arithmetic.
int strategy_lhs(const BellExpression& expr, const DeterministicStrategy& strategy);

/// max over all 4^n strategies of strategy_lhs.
int max_deterministic_lhs(const BellExpression& expr);

/// The 0/1 table of a deterministic strategy over parties 1..n.
ConditionalDistribution indicator_distribution(const DeterministicStrategy& strategy);

/// Division of {1..n} into nonempty disjoint blocks of 1-based party labels.
struct Partition {
  std::vector<std::vector<int>> blocks;

  /// Sorts each block, then orders blocks by size and smallest element.
  void canonicalize();
  [[nodiscard]] int parties() const;
  /// Throws DomainError unless the blocks partition {1..n} for some n.
  void validate() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Every partition of {1..n} into exactly m blocks, each once, canonical form.
/// The count is the Stirling number of the second kind S(n, m).
std::vector<Partition> enumerate_partitions(int n, int m);

nlohmann::json to_json(const Partition& partition);

struct NonsignalingReport {
  bool nonsignaling = true;
  double max_violation = 0.0;
};

/// For every party k of the block, the marginal of the other parties must not
/// depend on k's setting.
NonsignalingReport check_nonsignaling(const ConditionalDistribution& dist);

/// An optimal vertex of the nonsignaling polytope of the block for a random
/// Gaussian linear objective. Blocks of more than three parties are rejected.
ConditionalDistribution nonsignaling_vertex(std::vector<int> parties, std::mt19937_64& rng);

/// Random nonsignaling behavior of the block: single vertices, convex mixtures
/// of vertices, and for blocks larger than three parties mixtures of products
/// of smaller-block vertices.
ConditionalDistribution sample_nonsignaling_block(std::vector<int> parties, std::mt19937_64& rng);
ConditionalDistribution sample_nonsignaling_block(int size, std::uint64_t seed);

/// Convex combination of distributions over the same parties.
ConditionalDistribution mix(std::span<const ConditionalDistribution> parts,
                            std::span<const double> weights);

/// Product of distributions over disjoint party sets, over the union of those sets.
ConditionalDistribution product_of(std::span<const ConditionalDistribution> blocks);

/// Product distribution of an m-local model; `blocks[i]` must cover
/// `partition.blocks[i]` exactly, and the partition must cover {1..n}.
ConditionalDistribution product_distribution(const Partition& partition,
                                             std::span<const ConditionalDistribution> blocks);

/// Inequality left-hand side on a behavior over parties 1..n.
double distribution_lhs(const BellExpression& expr, const ConditionalDistribution& dist);

struct CertificationFailure {
  std::size_t sample = 0;
  double lhs = 0.0;
  Partition partition;
  std::vector<ConditionalDistribution> blocks;
};

struct CertificationReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double max_lhs = 0.0;
  std::size_t failures = 0;
  std::optional<CertificationFailure> first_failure;

  [[nodiscard]] bool certified() const { return failures == 0; }
};

/// Samples nonsignaling m-local product models (m = expr.m) and evaluates the
/// inequality on each. Sample i draws from split_stream(seed, i), so the
/// report does not depend on `workers`.
CertificationReport certify_m_local_bound(const BellExpression& expr, std::size_t samples,
                                          std::uint64_t seed, unsigned workers = 1);

nlohmann::json to_json(const CertificationFailure& failure, const BellExpression& expr);

}  // namespace mlocal
