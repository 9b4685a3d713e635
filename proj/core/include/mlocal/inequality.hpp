#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlocal {

/// Which of the two local observables a party measures.
enum class Setting : std::uint8_t { A = 0, B = 1 };

/// Binary measurement result.
enum class Outcome : std::uint8_t { Zero = 0, One = 1 };

/// One signed probability P(outcomes | settings) of a Bell expression.
/// Position k of both sequences belongs to party k+1.
struct Term {
  int coefficient = 1;
  std::vector<Setting> settings;
  std::vector<Outcome> outcomes;

  [[nodiscard]] int parties() const { return static_cast<int>(settings.size()); }

  /// Bit (n-1-k) set iff party k+1 measures B. Party 1 is the most significant bit.
  [[nodiscard]] std::uint32_t setting_mask() const;
  /// Bit (n-1-k) set iff party k+1 reports 1.
  [[nodiscard]] std::uint32_t outcome_mask() const;

  friend bool operator==(const Term&, const Term&) = default;
};

/// The (m-1)-th inequality of the hierarchy, in the form  sum_t c_t P_t <= 0.
/// `k_prime` is 1-based.
struct BellExpression {
  int n = 0;
  int m = 0;
  int k_prime = 1;
  std::vector<Term> terms;

  friend bool operator==(const BellExpression&, const BellExpression&) = default;
};

std::uint64_t binomial(int n, int k);

/// 1 + n + C(n-1, m-1). Throws DomainError unless 2 <= m <= n.
std::size_t term_count(int n, int m);

/// Builds the inequality for nonsignaling m-local models.
///
/// Term order: the positive P(0..0|a..a) term, then the n single-B terms by
/// ascending party, then the C(n-1, m-1) terms whose B-parties are k' plus an
/// (m-1)-subset of the other parties, subsets in lexicographic order.
/// m = 2 gives the genuine-nonlocality inequality, m = n gives Hardy's.
BellExpression build_hierarchy_inequality(int n, int m, int k_prime = 1);

/// Throws DomainError when any structural invariant of `expr` fails.
void validate(const BellExpression& expr);

enum class ExpressionFormat { Text, Structured };

/// "+P(0000|aaaa) -P(0000|baaa) ... <= 0"
std::string to_text(const BellExpression& expr);

nlohmann::json to_json(const BellExpression& expr);
BellExpression expression_from_json(const nlohmann::json& doc);

std::string serialize_expression(const BellExpression& expr, ExpressionFormat format);
/// Parses the structured form; throws DomainError on malformed input.
BellExpression parse_expression(std::string_view document);

std::string settings_string(const Term& term);
std::string outcomes_string(const Term& term);

}  // namespace mlocal
