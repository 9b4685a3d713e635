#include "mlocal/inequality.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>
#include <utility>

#include "mlocal/errors.hpp"

namespace mlocal {
namespace {

constexpr int kMaxParties = 30;

void require_parameters(int n, int m) {
  if (n < 2 || n > kMaxParties) {
    throw DomainError("party count n=" + std::to_string(n) + " outside [2, " +
                      std::to_string(kMaxParties) + "]");
  }
  if (m < 2 || m > n) {
    throw DomainError("locality parameter m=" + std::to_string(m) + " outside [2, n=" +
                      std::to_string(n) + "]");
  }
}

Term make_term(int n, int coefficient, std::uint32_t b_mask, std::uint32_t one_mask) {
  Term t;
  t.coefficient = coefficient;
  t.settings.resize(n);
  t.outcomes.resize(n);
  for (int k = 0; k < n; ++k) {
    const std::uint32_t bit = 1u << (n - 1 - k);
    t.settings[k] = (b_mask & bit) ? Setting::B : Setting::A;
    t.outcomes[k] = (one_mask & bit) ? Outcome::One : Outcome::Zero;
  }
  return t;
}

// Visits every `size`-subset of `pool` (already ascending) in lexicographic order.
template <typename Visit>
void for_each_subset(const std::vector<int>& pool, int size, Visit&& visit) {
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  const int total = static_cast<int>(pool.size());
  if (size > total) return;
  std::vector<int> chosen(size);
  while (true) {
    for (int i = 0; i < size; ++i) chosen[i] = pool[idx[i]];
    visit(chosen);
    int i = size - 1;
    while (i >= 0 && idx[i] == total - size + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::uint32_t Term::setting_mask() const {
  std::uint32_t mask = 0;
  const int n = parties();
  for (int k = 0; k < n; ++k) {
    if (settings[k] == Setting::B) mask |= 1u << (n - 1 - k);
  }
  return mask;
}

std::uint32_t Term::outcome_mask() const {
  std::uint32_t mask = 0;
  const int n = parties();
  for (int k = 0; k < n; ++k) {
    if (outcomes[k] == Outcome::One) mask |= 1u << (n - 1 - k);
  }
  return mask;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return result;
}

std::size_t term_count(int n, int m) {
  require_parameters(n, m);
  return 1 + static_cast<std::size_t>(n) + binomial(n - 1, m - 1);
}

BellExpression build_hierarchy_inequality(int n, int m, int k_prime) {
  require_parameters(n, m);
  if (k_prime < 1 || k_prime > n) {
    throw DomainError("k' = " + std::to_string(k_prime) + " outside [1, " + std::to_string(n) +
                      "]");
  }

  BellExpression expr{n, m, k_prime, {}};
  expr.terms.reserve(term_count(n, m));
  expr.terms.push_back(make_term(n, +1, 0, 0));
  for (int k = 0; k < n; ++k) {
    expr.terms.push_back(make_term(n, -1, 1u << (n - 1 - k), 0));
  }

  std::vector<int> others;
  for (int k = 1; k <= n; ++k) {
    if (k != k_prime) others.push_back(k);
  }
  for_each_subset(others, m - 1, [&](const std::vector<int>& subset) {
    std::uint32_t mask = 1u << (n - k_prime);
    for (int party : subset) mask |= 1u << (n - party);
    expr.terms.push_back(make_term(n, -1, mask, mask));
  });
  return expr;
}

void validate(const BellExpression& expr) {
  require_parameters(expr.n, expr.m);
  const int n = expr.n;
  if (expr.k_prime < 1 || expr.k_prime > n) throw DomainError("k' out of range");
  if (expr.terms.size() != term_count(n, expr.m)) {
    throw DomainError("expression has " + std::to_string(expr.terms.size()) +
                      " terms, expected " + std::to_string(term_count(n, expr.m)));
  }

  const std::uint32_t k_bit = 1u << (n - expr.k_prime);
  int positive = 0;
  int single_b = 0;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const Term& t : expr.terms) {
    if (t.parties() != n || static_cast<int>(t.outcomes.size()) != n) {
      throw DomainError("term length differs from n");
    }
    if (t.coefficient != 1 && t.coefficient != -1) throw DomainError("coefficient must be +-1");
    const auto b = t.setting_mask();
    const auto ones = t.outcome_mask();
    if (!seen.emplace(b, ones).second) throw DomainError("duplicate term");

    if (t.coefficient == 1) {
      if (b != 0 || ones != 0) throw DomainError("positive term must be P(0..0|a..a)");
      ++positive;
    } else if (ones == 0 && std::popcount(b) == 1) {
      ++single_b;
    } else if (ones != b || std::popcount(b) != expr.m || !(b & k_bit)) {
      throw DomainError("term " + outcomes_string(t) + "|" + settings_string(t) +
                        " does not belong to the hierarchy");
    }
  }
  if (positive != 1) throw DomainError("expected exactly one positive term");
  if (single_b != n) throw DomainError("expected n single-B terms");
}

std::string settings_string(const Term& term) {
  std::string s;
  s.reserve(term.settings.size());
  for (Setting x : term.settings) s.push_back(x == Setting::A ? 'a' : 'b');
  return s;
}

std::string outcomes_string(const Term& term) {
  std::string s;
  s.reserve(term.outcomes.size());
  for (Outcome r : term.outcomes) s.push_back(r == Outcome::Zero ? '0' : '1');
  return s;
}

std::string to_text(const BellExpression& expr) {
  std::ostringstream out;
  for (std::size_t i = 0; i < expr.terms.size(); ++i) {
    const Term& t = expr.terms[i];
    if (i > 0) out << ' ';
    out << (t.coefficient > 0 ? '+' : '-') << "P(" << outcomes_string(t) << '|'
        << settings_string(t) << ')';
  }
  out << " <= 0";
  return out.str();
}

nlohmann::json to_json(const BellExpression& expr) {
  nlohmann::json terms = nlohmann::json::array();
  for (const Term& t : expr.terms) {
    terms.push_back({{"coefficient", t.coefficient},
                     {"settings", settings_string(t)},
                     {"outcomes", outcomes_string(t)}});
  }
  nlohmann::json doc;
  doc["n"] = expr.n;
  doc["m"] = expr.m;
  doc["k_prime"] = expr.k_prime;
  doc["terms"] = std::move(terms);
  return doc;
}

BellExpression expression_from_json(const nlohmann::json& doc) {
  BellExpression expr;
  try {
    expr.n = doc.at("n").get<int>();
    expr.m = doc.at("m").get<int>();
    expr.k_prime = doc.at("k_prime").get<int>();
    for (const auto& record : doc.at("terms")) {
      Term t;
      t.coefficient = record.at("coefficient").get<int>();
      for (char c : record.at("settings").get<std::string>()) {
        if (c != 'a' && c != 'b') throw DomainError(std::string("bad setting symbol '") + c + "'");
        t.settings.push_back(c == 'a' ? Setting::A : Setting::B);
      }
      for (char c : record.at("outcomes").get<std::string>()) {
        if (c != '0' && c != '1') throw DomainError(std::string("bad outcome symbol '") + c + "'");
        t.outcomes.push_back(c == '0' ? Outcome::Zero : Outcome::One);
      }
      expr.terms.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed expression document: ") + e.what());
  }
  validate(expr);
  return expr;
}

std::string serialize_expression(const BellExpression& expr, ExpressionFormat format) {
  if (format == ExpressionFormat::Text) return to_text(expr) + "\n";
  return to_json(expr).dump(2) + "\n";
}

BellExpression parse_expression(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("expression is not valid JSON: ") + e.what());
  }
  return expression_from_json(doc);
}

}  // namespace mlocal
