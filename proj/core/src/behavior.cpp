#include "mlocal/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mlocal/errors.hpp"

namespace mlocal {

ConditionalDistribution::ConditionalDistribution(std::vector<int> parties,
                                                 std::vector<double> table)
    : parties_(std::move(parties)), table_(std::move(table)) {
  if (!std::is_sorted(parties_.begin(), parties_.end()) ||
      std::adjacent_find(parties_.begin(), parties_.end()) != parties_.end()) {
    throw DomainError("distribution parties must be strictly ascending");
  }
  if (parties_.size() > 15) throw DomainError("distribution block too large");
  const std::size_t r = rows();
  if (table_.size() != r * r) {
    throw DimensionMismatch("table holds " + std::to_string(table_.size()) + " entries, expected " +
                            std::to_string(r * r));
  }
}

ConditionalDistribution ConditionalDistribution::uniform(std::vector<int> parties) {
  const std::size_t r = std::size_t{1} << parties.size();
  return ConditionalDistribution(std::move(parties),
                                 std::vector<double>(r * r, 1.0 / static_cast<double>(r)));
}

void ConditionalDistribution::clamp_and_renormalize() {
  const std::size_t r = rows();
  for (std::size_t s = 0; s < r; ++s) {
    double sum = 0.0;
    for (std::size_t o = 0; o < r; ++o) {
      double& v = table_[s * r + o];
      if (v < -kClampTolerance) {
        throw std::logic_error("probability entry " + std::to_string(v) + " is negative");
      }
      v = std::max(v, 0.0);
      sum += v;
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
      throw std::logic_error("setting row sums to " + std::to_string(sum));
    }
    for (std::size_t o = 0; o < r; ++o) table_[s * r + o] /= sum;
  }
}

double ConditionalDistribution::normalization_error() const {
  const std::size_t r = rows();
  double worst = 0.0;
  for (std::size_t s = 0; s < r; ++s) {
    double sum = 0.0;
    for (std::size_t o = 0; o < r; ++o) sum += table_[s * r + o];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double ConditionalDistribution::min_entry() const {
  return table_.empty() ? 0.0 : *std::min_element(table_.begin(), table_.end());
}

nlohmann::json to_json(const ConditionalDistribution& dist) {
  return {{"parties", std::vector<int>(dist.parties().begin(), dist.parties().end())},
          {"layout", "row-major, setting-major"},
          {"table", std::vector<double>(dist.table().begin(), dist.table().end())}};
}

}  // namespace mlocal
