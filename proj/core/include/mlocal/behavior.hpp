#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlocal {

/// Conditional probability table P(r_beta | M_beta) over a block beta of parties.
///
/// Parties are 1-based labels in ascending order. For a block of size s the
/// table is row-major with 2^s setting rows and 2^s outcome columns. Within a
/// row or column index, the first listed party is the most significant bit;
/// setting bit 0 is A and 1 is B.
class ConditionalDistribution {
 public:
  static constexpr double kNormalizationTolerance = 1e-9;
  static constexpr double kClampTolerance = 1e-12;

  ConditionalDistribution() = default;
  ConditionalDistribution(std::vector<int> parties, std::vector<double> table);

  /// All rows equal to 1/2^s.
  static ConditionalDistribution uniform(std::vector<int> parties);

  [[nodiscard]] int size() const { return static_cast<int>(parties_.size()); }
  [[nodiscard]] std::size_t rows() const { return std::size_t{1} << parties_.size(); }
  [[nodiscard]] std::span<const int> parties() const { return parties_; }
  [[nodiscard]] std::span<const double> table() const { return table_; }

  [[nodiscard]] double at(std::uint32_t settings, std::uint32_t outcomes) const {
    return table_[settings * rows() + outcomes];
  }
  double& at(std::uint32_t settings, std::uint32_t outcomes) {
    return table_[settings * rows() + outcomes];
  }

  /// Clamps entries in [-kClampTolerance, 0) to zero and rescales each row to sum 1.
  /// Throws std::logic_error if an entry is more negative than the tolerance
  /// or a row sum is off by more than kNormalizationTolerance.
  void clamp_and_renormalize();

  /// Largest |row sum - 1| over setting rows.
  [[nodiscard]] double normalization_error() const;
  [[nodiscard]] double min_entry() const;

  friend bool operator==(const ConditionalDistribution&, const ConditionalDistribution&) = default;

 private:
  std::vector<int> parties_;
  std::vector<double> table_;
};

nlohmann::json to_json(const ConditionalDistribution& dist);

}  // namespace mlocal
