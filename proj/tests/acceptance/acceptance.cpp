// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mlocal/inequality.hpp"
#include "mlocal/lhv.hpp"
#include "mlocal/parallel.hpp"
#include "mlocal/quantum.hpp"
#include "mlocal/search.hpp"
#include "oracles.hpp"

using namespace mlocal;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

constexpr double kTableRuntimeBudgetSeconds = 600.0;

struct TableRow {
  int n;
  std::vector<double> published;  // p_1 .. p_{n-1}
  double tolerance;
};

void check_table(StateFamily family, const std::vector<TableRow>& rows, Verdict& out) {
  OptimizerConfig config;
  config.workers = default_workers();
  const auto start = std::chrono::steady_clock::now();
  for (const auto& row : rows) {
    const std::vector<int> n_list = {row.n};
    const auto results = reproduce_table(family, n_list, config);
    out.detail << " n=" << row.n << ":";
    for (const auto& r : results) {
      const double expected = row.published[r.inequality_index() - 1];
      char buf[64];
      std::snprintf(buf, sizeof buf, " %.4f(%.3f)", r.p_threshold, expected);
      out.detail << buf;
      out.require(std::abs(r.p_threshold - expected) <= row.tolerance,
                  family_name(family) + " n=" + std::to_string(r.n) + " p_" +
                      std::to_string(r.inequality_index()));
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.detail << " runtime=" << seconds << "s";
  out.require(seconds < kTableRuntimeBudgetSeconds, "runtime budget");
}

void criterion_table_ghz(Verdict& out) {
  check_table(StateFamily::GHZ,
              {{4, {0.948, 0.914, 0.822}, 0.005},
               {5, {0.964, 0.952, 0.923, 0.847}, 0.01},
               {6, {0.971, 0.969, 0.960, 0.931, 0.866}, 0.01}},
              out);
}

void criterion_table_w(Verdict& out) {
  check_table(StateFamily::W,
              {{4, {0.903, 0.770, 0.573}, 0.005},
               {5, {0.911, 0.792, 0.688, 0.462}, 0.01},
               {6, {0.894, 0.783, 0.721, 0.593, 0.344}, 0.01}},
              out);
}

void criterion_classical_bound(Verdict& out) {
  for (int n = 2; n <= 6; ++n) {
    for (int m = 2; m <= n; ++m) {
      const auto expr = build_hierarchy_inequality(n, m, 1);
      const int best = max_deterministic_lhs(expr);
      out.require(best <= 0, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " max>0");
      if (m == n) {
        out.require(best == 0, "Hardy n=" + std::to_string(n) + " max != 0");
      }
    }
  }
  out.detail << " all 4^n strategies, n=2..6";
}

void criterion_certification(Verdict& out) {
  constexpr std::size_t kSamples = 10000;
  double worst = -1.0;
  for (int n = 3; n <= 6; ++n) {
    for (int m = 2; m <= n; ++m) {
      const auto expr = build_hierarchy_inequality(n, m, 1);
      const auto report =
          certify_m_local_bound(expr, kSamples, 1000 * n + m, default_workers());
      worst = std::max(worst, report.max_lhs);
      out.require(report.certified() && report.max_lhs <= kBoundTolerance,
                  "n=" + std::to_string(n) + " m=" + std::to_string(m));
    }
  }
  out.detail << " " << kSamples << " samples per (n,m), worst LHS=" << worst;
}

std::vector<std::string> pattern(const BellExpression& expr) {
  std::vector<std::string> p;
  for (const auto& t : expr.terms) {
    p.push_back((t.coefficient > 0 ? "+" : "-") + outcomes_string(t) + "|" + settings_string(t));
  }
  return p;
}

void criterion_structure(Verdict& out) {
  const std::vector<std::string> head = {"+0000|aaaa", "-0000|baaa", "-0000|abaa", "-0000|aaba",
                                         "-0000|aaab"};
  auto with = [&](std::vector<std::string> tail) {
    auto p = head;
    p.insert(p.end(), tail.begin(), tail.end());
    return p;
  };
  out.require(pattern(build_hierarchy_inequality(4, 2, 1)) ==
                  with({"-1100|bbaa", "-1010|baba", "-1001|baab"}),
              "four-party genuine form");
  out.require(pattern(build_hierarchy_inequality(4, 3, 1)) ==
                  with({"-1110|bbba", "-1101|bbab", "-1011|babb"}),
              "four-party intermediate form");
  out.require(pattern(build_hierarchy_inequality(4, 4, 1)) == with({"-1111|bbbb"}),
              "four-party Hardy form");

  // Pascal's triangle, independent of the library's binomial.
  std::vector<std::vector<std::uint64_t>> pascal(11, std::vector<std::uint64_t>(11, 0));
  for (int i = 0; i <= 10; ++i) {
    pascal[i][0] = 1;
    for (int j = 1; j <= i; ++j) pascal[i][j] = pascal[i - 1][j - 1] + pascal[i - 1][j];
  }
  int checked = 0;
  for (int n = 2; n <= 10; ++n) {
    for (int m = 2; m <= n; ++m) {
      const std::size_t expected = 1 + n + pascal[n - 1][m - 1];
      out.require(term_count(n, m) == expected, "term_count n=" + std::to_string(n));
      out.require(build_hierarchy_inequality(n, m, 1).terms.size() == expected,
                  "built size n=" + std::to_string(n));
      ++checked;
    }
  }
  out.detail << " golden four-party patterns + " << checked << " (n,m) counts";
}

StateVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Amplitude> amps(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : amps) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return StateVector(n, std::move(amps));
}

MeasurementAngles random_angles(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  MeasurementAngles a;
  for (int k = 0; k < n; ++k) {
    a.theta_a.push_back(angle(rng));
    a.theta_b.push_back(angle(rng));
  }
  return a;
}

void criterion_cross_oracle(Verdict& out) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_dense = 0.0, worst_behavior = 0.0;
  for (int n = 2; n <= 6; ++n) {
    for (int draw = 0; draw < 100; ++draw) {
      const int m = 2 + draw % (n - 1);
      const auto expr = build_hierarchy_inequality(n, m, 1);
      const auto psi = random_state(n, rng);
      const double p = unit(rng);
      const auto angles = random_angles(n, rng);
      const double fast = evaluate_lhs(expr, NoisyState(psi, p), angles);
      const auto rho = oracle::noisy_density(psi, p);
      const auto projectors = oracle::projector_sets(angles);
      worst_dense = std::max(worst_dense,
                             std::abs(fast - oracle::dense_density_oracle(expr, rho, projectors)));
      if (draw < 10) {
        const auto behavior = oracle::dense_behavior(rho, projectors);
        worst_behavior = std::max(worst_behavior, std::abs(fast - distribution_lhs(expr, behavior)));
      }
    }
  }
  out.detail << " max|fast-dense|=" << worst_dense << " max|behavior-fast|=" << worst_behavior;
  out.require(worst_dense < 1e-10, "dense oracle");
  out.require(worst_behavior < 1e-10, "behavior table");
}

void criterion_affinity(Verdict& out) {
  std::mt19937_64 rng(7);
  double worst_line = 0.0, worst_zero = 0.0;
  for (int n = 2; n <= 6; ++n) {
    for (int m = 2; m <= n; ++m) {
      const auto expr = build_hierarchy_inequality(n, m, 1);
      for (int draw = 0; draw < 20; ++draw) {
        const auto psi = draw % 2 ? w_state(n) : random_state(n, rng);
        const auto angles = random_angles(n, rng);
        const double l0 = evaluate_lhs(expr, NoisyState(psi, 0.0), angles);
        const double lh = evaluate_lhs(expr, NoisyState(psi, 0.5), angles);
        const double l1 = evaluate_lhs(expr, NoisyState(psi, 1.0), angles);
        worst_line = std::max(worst_line, std::abs(lh - 0.5 * (l0 + l1)));
        const double closed =
            (1.0 - n - static_cast<double>(binomial(n - 1, m - 1))) / std::ldexp(1.0, n);
        worst_zero = std::max(worst_zero, std::abs(l0 - closed));
      }
    }
  }
  out.detail << " collinearity=" << worst_line << " LHS(0) error=" << worst_zero;
  out.require(worst_line <= 1e-12, "collinearity");
  out.require(worst_zero <= 1e-12, "LHS(0) closed form");
}

void criterion_optimizer(Verdict& out) {
  OptimizerConfig config;
  config.workers = default_workers();
  const auto psi = ghz_state(4);
  for (int m = 2; m <= 4; ++m) {
    const auto expr = build_hierarchy_inequality(4, m, 1);
    const double opt = maximize_violation(expr, NoisyState(psi, 1.0), config).max_lhs;
    const double grid = oracle::symmetric_grid_max(expr, psi, 1.0, 360);
    char buf[96];
    std::snprintf(buf, sizeof buf, " m=%d opt=%.8f grid=%.8f", m, opt, grid);
    out.detail << buf;
    out.require(std::abs(opt - grid) <= 1e-4, "m=" + std::to_string(m));
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {"1 GHZ threshold table", criterion_table_ghz},
      {"2 W threshold table", criterion_table_w},
      {"3 classical (fully local) bound", criterion_classical_bound},
      {"4 m-local bound certification", criterion_certification},
      {"5 structural golden patterns", criterion_structure},
      {"6 cross-oracle equivalence", criterion_cross_oracle},
      {"7 affinity in p", criterion_affinity},
      {"8 optimizer vs exhaustive grid", criterion_optimizer},
  };

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict out;
    const auto start = std::chrono::steady_clock::now();
    try {
      run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " exception: " << e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("[%s] criterion %s (%.1fs):%s\n", out.pass ? "PASS" : "FAIL", name.c_str(), seconds,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
