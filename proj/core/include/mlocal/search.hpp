#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlocal/inequality.hpp"
#include "mlocal/quantum.hpp"

namespace mlocal {

/// Party 1 uses (theta_a1, theta_b1); parties 2..n share (theta_a_rest, theta_b_rest).
struct SymmetricAngles {
  double theta_a1 = 0.0;
  double theta_b1 = 0.0;
  double theta_a_rest = 0.0;
  double theta_b_rest = 0.0;

  [[nodiscard]] MeasurementAngles expand(int n) const;
  [[nodiscard]] SymmetricAngles normalized() const;
  [[nodiscard]] std::array<double, 4> as_array() const {
    return {theta_a1, theta_b1, theta_a_rest, theta_b_rest};
  }
  static SymmetricAngles from_array(std::span<const double, 4> x) { return {x[0], x[1], x[2], x[3]}; }
};

struct OptimizerConfig {
  int grid_resolution = 24;     // points per angle over [0, 2pi)
  int refinement_rounds = 40;   // compass step halvings
  double local_tolerance = 1e-9;
  int restarts = 8;             // best coarse points refined locally
  std::uint64_t rng_seed = 20170101;
  unsigned workers = 1;

  /// Throws DomainError if any field is out of range.
  void validate() const;
};

struct ViolationResult {
  double max_lhs = 0.0;
  double coarse_best = 0.0;
  MeasurementAngles angles;
  std::optional<SymmetricAngles> symmetric;
};

/// Maximizes evaluate_lhs over X-Z-plane settings: a coarse grid followed by
/// compass search from the `restarts` best grid points. With `symmetric` the
/// search runs over the four angles of SymmetricAngles; otherwise over all 2n
/// angles, seeded by the lifted symmetric grid plus seeded random points.
/// Deterministic for a given config regardless of `config.workers`.
ViolationResult maximize_violation(const BellExpression& expr, const NoisyState& state,
                                   const OptimizerConfig& config, bool symmetric = true);

/// Threshold predicates use "max LHS > kViolationMargin".
inline constexpr double kViolationMargin = 1e-9;
inline constexpr double kDefaultBisectionTolerance = 5e-4;

struct ThresholdResult {
  int n = 0;
  int m = 0;
  StateFamily family = StateFamily::GHZ;
  double p_threshold = 0.0;
  double p_lower = 0.0;  // predicate false here
  double p_upper = 1.0;  // predicate true here
  int bisection_steps = 0;
  SymmetricAngles best_angles;
  double max_lhs_at_p1 = 0.0;
  std::uint64_t seed = 0;

  /// Column index of the published tables: m - 1.
  [[nodiscard]] int inequality_index() const { return m - 1; }
};

/// Smallest visibility at which the (m-1)-th inequality (k' = 1) is violated,
/// by bisection on p in [0, 1]. Throws NoViolation if p = 1 does not violate.
ThresholdResult find_threshold(int n, int m, StateFamily family, const OptimizerConfig& config,
                               double bisection_tolerance = kDefaultBisectionTolerance);

/// All thresholds p_1 .. p_{n-1} for each requested n (4 <= n <= 8), row-major.
std::vector<ThresholdResult> reproduce_table(StateFamily family, std::span<const int> n_list,
                                             const OptimizerConfig& config,
                                             double bisection_tolerance = kDefaultBisectionTolerance);

std::string family_name(StateFamily family);
/// "ghz" or "w", case-insensitive; throws DomainError otherwise.
StateFamily parse_family(std::string_view text);

std::string threshold_csv_header();
std::string to_csv_row(const ThresholdResult& result);
nlohmann::json to_json(const ThresholdResult& result);

}  // namespace mlocal
