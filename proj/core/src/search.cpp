#include "mlocal/search.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mlocal/errors.hpp"
#include "mlocal/parallel.hpp"
#include "mlocal/random.hpp"

namespace mlocal {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxPollsPerRound = 100000;

struct Candidate {
  double value;
  std::vector<double> x;
};

// Higher value first; ties go to the lexicographically smaller point.
bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.x < b.x;
}

class Objective {
 public:
  Objective(const BellExpression& expr, const NoisyState& state, bool symmetric)
      : eval_(expr, state), n_(state.parties()), symmetric_(symmetric) {}

  [[nodiscard]] std::size_t dimension() const { return symmetric_ ? 4 : 2 * n_; }

  [[nodiscard]] double operator()(std::span<const double> x) const {
    return eval_(to_angles(x));
  }

  [[nodiscard]] MeasurementAngles to_angles(std::span<const double> x) const {
    if (symmetric_) return SymmetricAngles{x[0], x[1], x[2], x[3]}.expand(n_);
    MeasurementAngles a;
    a.theta_a.assign(x.begin(), x.begin() + n_);
    a.theta_b.assign(x.begin() + n_, x.end());
    return a;
  }

 private:
  LhsEvaluator eval_;
  int n_;
  bool symmetric_;
};

// Compass search: poll +-step along each axis, move on the first improvement,
// halve the step when no poll improves.
Candidate compass_search(const Objective& f, Candidate start, double step,
                         const OptimizerConfig& config) {
  Candidate cur = std::move(start);
  std::vector<double> trial(cur.x.size());
  for (int round = 0; round < config.refinement_rounds && step >= config.local_tolerance;
       ++round, step *= 0.5) {
    for (int polls = 0; polls < kMaxPollsPerRound; ++polls) {
      bool moved = false;
      for (std::size_t d = 0; d < cur.x.size() && !moved; ++d) {
        for (double dir : {+1.0, -1.0}) {
          trial = cur.x;
          trial[d] += dir * step;
          const double v = f(trial);
          if (v > cur.value) {
            cur.x = trial;
            cur.value = v;
            moved = true;
            break;
          }
        }
      }
      if (!moved) break;
    }
  }
  for (double& t : cur.x) t = normalize_angle(t);
  cur.value = f(cur.x);
  return cur;
}

std::vector<double> grid_point(std::size_t index, int resolution, std::size_t dims) {
  std::vector<double> x(dims);
  for (std::size_t d = dims; d-- > 0;) {
    x[d] = kTwoPi * static_cast<double>(index % resolution) / resolution;
    index /= resolution;
  }
  return x;
}

std::vector<double> lift_symmetric(std::span<const double> s, int n) {
  std::vector<double> x(2 * n);
  for (int k = 0; k < n; ++k) {
    x[k] = k == 0 ? s[0] : s[2];
    x[n + k] = k == 0 ? s[1] : s[3];
  }
  return x;
}

}  // namespace

MeasurementAngles SymmetricAngles::expand(int n) const {
  MeasurementAngles a;
  a.theta_a.assign(n, theta_a_rest);
  a.theta_b.assign(n, theta_b_rest);
  a.theta_a[0] = theta_a1;
  a.theta_b[0] = theta_b1;
  return a;
}

SymmetricAngles SymmetricAngles::normalized() const {
  return {normalize_angle(theta_a1), normalize_angle(theta_b1), normalize_angle(theta_a_rest),
          normalize_angle(theta_b_rest)};
}

void OptimizerConfig::validate() const {
  if (grid_resolution < 1) throw DomainError("grid_resolution must be positive");
  if (refinement_rounds < 1) throw DomainError("refinement_rounds must be positive");
  if (!(local_tolerance > 0.0)) throw DomainError("local_tolerance must be positive");
  if (restarts < 1) throw DomainError("restarts must be positive");
}

ViolationResult maximize_violation(const BellExpression& expr, const NoisyState& state,
                                   const OptimizerConfig& config, bool symmetric) {
  config.validate();
  const Objective f(expr, state, symmetric);
  const int n = state.parties();
  const int res = config.grid_resolution;

  // Coarse stage. The four-angle grid is shared by both parametrizations.
  std::size_t grid_size = 1;
  for (int d = 0; d < 4; ++d) grid_size *= static_cast<std::size_t>(res);
  const std::size_t random_points = symmetric ? 0 : static_cast<std::size_t>(res) * res;
  std::vector<double> values(grid_size + random_points);

  auto point = [&](std::size_t i) {
    if (i < grid_size) {
      auto s = grid_point(i, res, 4);
      return symmetric ? s : lift_symmetric(s, n);
    }
    auto rng = split_stream(config.rng_seed, i - grid_size);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<double> x(f.dimension());
    for (double& t : x) t = angle(rng);
    return x;
  };
  parallel_for(values.size(), config.workers, [&](std::size_t i) { values[i] = f(point(i)); });

  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t keep = std::min<std::size_t>(config.restarts, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (values[a] != values[b]) return values[a] > values[b];
                      return a < b;
                    });

  // Local stage.
  std::vector<Candidate> refined(keep);
  const double step = kTwoPi / res;
  parallel_for(keep, config.workers, [&](std::size_t r) {
    refined[r] = compass_search(f, Candidate{values[order[r]], point(order[r])}, step, config);
  });
  const Candidate best = *std::min_element(refined.begin(), refined.end(), better);

  ViolationResult result;
  result.coarse_best = values[order.front()];
  result.max_lhs = std::max(best.value, result.coarse_best);
  result.angles = f.to_angles(best.x).normalized();
  if (symmetric) result.symmetric = SymmetricAngles{best.x[0], best.x[1], best.x[2], best.x[3]};
  return result;
}

ThresholdResult find_threshold(int n, int m, StateFamily family, const OptimizerConfig& config,
                               double bisection_tolerance) {
  const BellExpression expr = build_hierarchy_inequality(n, m, 1);
  if (!(bisection_tolerance > 0.0)) throw DomainError("bisection tolerance must be positive");
  config.validate();
  const StateVector psi = make_state(family, n);

  auto max_at = [&](double p) {
    return maximize_violation(expr, NoisyState(psi, p), config, true);
  };

  ThresholdResult result;
  result.n = n;
  result.m = m;
  result.family = family;
  result.seed = config.rng_seed;

  const ViolationResult top = max_at(1.0);
  result.max_lhs_at_p1 = top.max_lhs;
  result.best_angles = top.symmetric.value_or(SymmetricAngles{});
  if (!(top.max_lhs > kViolationMargin)) {
    throw NoViolation("no violation at p=1 for " + family_name(family) + " n=" +
                      std::to_string(n) + " m=" + std::to_string(m) +
                      "; threshold undefined");
  }

  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > bisection_tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (max_at(mid).max_lhs > kViolationMargin) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++result.bisection_steps;
  }
  result.p_lower = lo;
  result.p_upper = hi;
  result.p_threshold = 0.5 * (lo + hi);
  return result;
}

std::vector<ThresholdResult> reproduce_table(StateFamily family, std::span<const int> n_list,
                                             const OptimizerConfig& config,
                                             double bisection_tolerance) {
  for (int n : n_list) {
    if (n < 4 || n > 8) throw DomainError("table rows cover 4 <= n <= 8, got n=" + std::to_string(n));
  }
  std::vector<ThresholdResult> rows;
  for (int n : n_list) {
    for (int m = 2; m <= n; ++m) {
      rows.push_back(find_threshold(n, m, family, config, bisection_tolerance));
    }
  }
  return rows;
}

std::string family_name(StateFamily family) { return family == StateFamily::GHZ ? "ghz" : "w"; }

StateFamily parse_family(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ghz") return StateFamily::GHZ;
  if (lower == "w") return StateFamily::W;
  throw DomainError("unknown state family '" + std::string(text) + "' (expected ghz or w)");
}

std::string threshold_csv_header() {
  return "family,n,i,m,p_i,max_lhs_at_p1,theta_a1,theta_b1,theta_a,theta_b,seed";
}

std::string to_csv_row(const ThresholdResult& r) {
  const SymmetricAngles a = r.best_angles.normalized();
  std::ostringstream out;
  out.precision(12);
  out << family_name(r.family) << ',' << r.n << ',' << r.inequality_index() << ',' << r.m << ','
      << r.p_threshold << ',' << r.max_lhs_at_p1 << ',' << a.theta_a1 << ',' << a.theta_b1 << ','
      << a.theta_a_rest << ',' << a.theta_b_rest << ',' << r.seed;
  return out.str();
}

nlohmann::json to_json(const ThresholdResult& r) {
  const SymmetricAngles a = r.best_angles.normalized();
  return {{"family", family_name(r.family)},
          {"n", r.n},
          {"i", r.inequality_index()},
          {"m", r.m},
          {"p_threshold", r.p_threshold},
          {"p_bracket", {r.p_lower, r.p_upper}},
          {"bisection_steps", r.bisection_steps},
          {"max_lhs_at_p1", r.max_lhs_at_p1},
          {"best_angles",
           {{"theta_a1", a.theta_a1},
            {"theta_b1", a.theta_b1},
            {"theta_a", a.theta_a_rest},
            {"theta_b", a.theta_b_rest}}},
          {"seed", r.seed}};
}

}  // namespace mlocal
