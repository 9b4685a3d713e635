// Command-line front end: build, evaluate, certify, threshold, table.
//
// Every parameter is a top-level option so a flat key=value file given with
// --config can stand in for flags; flags on the command line win.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlocal/errors.hpp"
#include "mlocal/inequality.hpp"
#include "mlocal/lhv.hpp"
#include "mlocal/quantum.hpp"
#include "mlocal/search.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFinding = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::vector<int> n;
  int m = 0;
  int k_prime = 1;
  std::string family;
  double p = -1.0;
  std::string theta_a;
  std::string theta_b;
  std::string symmetric;
  std::size_t samples = 10000;
  std::uint64_t seed = mlocal::OptimizerConfig{}.rng_seed;
  unsigned workers = 1;
  std::string format;
  std::string output;
  mlocal::OptimizerConfig optimizer;
  double bisection_tolerance = mlocal::kDefaultBisectionTolerance;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<double> parse_angle_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    std::string item = text.substr(pos, end - pos);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() ||
        !std::isfinite(value)) {
      throw UsageError(std::string("malformed ") + what + " entry '" + item + "'");
    }
    out.push_back(value);
    pos = end + 1;
  }
  return out;
}

int single_n(const RunConfig& cfg) {
  if (cfg.n.size() != 1) throw UsageError("--n takes exactly one value for this command");
  return cfg.n.front();
}

mlocal::StateFamily require_family(const RunConfig& cfg) {
  if (cfg.family.empty()) throw UsageError("--family is required (ghz or w)");
  return mlocal::parse_family(cfg.family);
}

void require_m(const RunConfig& cfg) {
  if (cfg.m == 0) throw UsageError("--m is required");
}

// Writes to a sibling temporary and renames, so readers never see partial files.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const std::filesystem::path target(cfg.output);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string format_value(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

int cmd_build(const RunConfig& cfg) {
  require_m(cfg);
  const auto expr = mlocal::build_hierarchy_inequality(single_n(cfg), cfg.m, cfg.k_prime);
  const auto format = cfg.format == "structured" ? mlocal::ExpressionFormat::Structured
                                                 : mlocal::ExpressionFormat::Text;
  emit(cfg, mlocal::serialize_expression(expr, format));
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg) {
  require_m(cfg);
  const int n = single_n(cfg);
  const auto family = require_family(cfg);
  if (cfg.p < 0.0) throw UsageError("--p is required");

  mlocal::MeasurementAngles angles;
  if (!cfg.symmetric.empty()) {
    const auto s = parse_angle_list(cfg.symmetric, "--symmetric");
    if (s.size() != 4) throw UsageError("--symmetric needs theta_a1,theta_b1,theta_a,theta_b");
    angles = mlocal::SymmetricAngles{s[0], s[1], s[2], s[3]}.expand(n);
  } else {
    if (cfg.theta_a.empty() || cfg.theta_b.empty()) {
      throw UsageError("give --theta-a and --theta-b, or --symmetric");
    }
    angles.theta_a = parse_angle_list(cfg.theta_a, "--theta-a");
    angles.theta_b = parse_angle_list(cfg.theta_b, "--theta-b");
    if (angles.parties() != n || static_cast<int>(angles.theta_b.size()) != n) {
      throw UsageError("angle lists must have exactly n=" + std::to_string(n) + " entries");
    }
  }

  const auto expr = mlocal::build_hierarchy_inequality(n, cfg.m, cfg.k_prime);
  const mlocal::NoisyState state(mlocal::make_state(family, n), cfg.p);
  const double lhs = mlocal::evaluate_lhs(expr, state, angles);

  if (cfg.format == "structured") {
    nlohmann::json doc = {{"family", mlocal::family_name(family)},
                          {"n", n},
                          {"m", cfg.m},
                          {"k_prime", cfg.k_prime},
                          {"p", cfg.p},
                          {"theta_a", angles.theta_a},
                          {"theta_b", angles.theta_b},
                          {"lhs", lhs},
                          {"violated", lhs > 0.0}};
    emit(cfg, doc.dump(2) + "\n");
  } else {
    emit(cfg, format_value(lhs) + "\n");
  }
  return kExitOk;
}

int cmd_certify(const RunConfig& cfg) {
  require_m(cfg);
  const int n = single_n(cfg);
  if (n > mlocal::kMaxEnumerationParties) {
    throw UsageError("certify supports n <= " + std::to_string(mlocal::kMaxEnumerationParties));
  }
  const auto expr = mlocal::build_hierarchy_inequality(n, cfg.m, cfg.k_prime);
  const int deterministic = mlocal::max_deterministic_lhs(expr);
  const auto report = mlocal::certify_m_local_bound(expr, cfg.samples, cfg.seed, cfg.workers);
  const bool ok = deterministic <= 0 && report.certified();

  if (cfg.format == "structured") {
    nlohmann::json doc = {{"n", n},
                          {"m", cfg.m},
                          {"k_prime", cfg.k_prime},
                          {"seed", cfg.seed},
                          {"samples", report.samples},
                          {"deterministic_max_lhs", deterministic},
                          {"sampled_max_lhs", report.max_lhs},
                          {"failures", report.failures},
                          {"certified", ok}};
    if (report.first_failure) doc["first_failure"] = mlocal::to_json(*report.first_failure, expr);
    emit(cfg, doc.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "# seed=" << cfg.seed << "\n"
        << "# certify n=" << n << " m=" << cfg.m << " k_prime=" << cfg.k_prime
        << " samples=" << report.samples << "\n"
        << "deterministic_max_lhs " << deterministic << "\n"
        << "sampled_max_lhs " << format_value(report.max_lhs) << "\n"
        << "failures " << report.failures << "\n"
        << "status " << (ok ? "certified" : "FAILED") << "\n";
    if (report.first_failure) {
      out << mlocal::to_json(*report.first_failure, expr).dump() << "\n";
    }
    emit(cfg, out.str());
  }
  return ok ? kExitOk : kExitFinding;
}

std::string render_thresholds(const RunConfig& cfg,
                              const std::vector<mlocal::ThresholdResult>& rows) {
  if (cfg.format == "structured") {
    nlohmann::json doc = {{"seed", cfg.optimizer.rng_seed},
                          {"bisection_tolerance", cfg.bisection_tolerance},
                          {"optimizer",
                           {{"grid_resolution", cfg.optimizer.grid_resolution},
                            {"refinement_rounds", cfg.optimizer.refinement_rounds},
                            {"local_tolerance", cfg.optimizer.local_tolerance},
                            {"restarts", cfg.optimizer.restarts}}},
                          {"results", nlohmann::json::array()}};
    for (const auto& r : rows) doc["results"].push_back(mlocal::to_json(r));
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "# seed=" << cfg.optimizer.rng_seed << "\n";
  if (cfg.format == "text") {
    for (const auto& r : rows) {
      out << mlocal::family_name(r.family) << " n=" << r.n << " p_" << r.inequality_index()
          << " = " << std::fixed << std::setprecision(3) << r.p_threshold << std::defaultfloat
          << "\n";
    }
    return out.str();
  }
  out << mlocal::threshold_csv_header() << "\n";
  for (const auto& r : rows) out << mlocal::to_csv_row(r) << "\n";
  return out.str();
}

int cmd_threshold(const RunConfig& cfg) {
  require_m(cfg);
  const auto family = require_family(cfg);
  const auto result = mlocal::find_threshold(single_n(cfg), cfg.m, family, cfg.optimizer,
                                             cfg.bisection_tolerance);
  emit(cfg, render_thresholds(cfg, {result}));
  return kExitOk;
}

int cmd_table(const RunConfig& cfg) {
  const auto family = require_family(cfg);
  if (cfg.n.empty()) throw UsageError("--n is required");
  const auto rows = mlocal::reproduce_table(family, cfg.n, cfg.optimizer, cfg.bisection_tolerance);
  emit(cfg, render_thresholds(cfg, rows));
  return kExitOk;
}

void log_environment_overrides() {
  for (const char* name : {"MLOCAL_WORKERS", "MLOCAL_SEED"}) {
    if (const char* v = std::getenv(name)) std::cerr << "# " << name << "=" << v << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipartite Bell-type inequality hierarchy toolkit"};
  app.set_config("--config", "", "Flat key=value file supplying option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--n", cfg.n, "Party count (table: one or more rows)");
  app.add_option("--m", cfg.m, "Locality parameter, 2 <= m <= n");
  app.add_option("--k-prime", cfg.k_prime, "Distinguished party (1-based)")->capture_default_str();
  app.add_option("--family", cfg.family, "State family: ghz or w");
  app.add_option("--p", cfg.p, "Visibility in [0, 1]");
  app.add_option("--theta-a", cfg.theta_a, "Comma-separated A angles (radians), one per party");
  app.add_option("--theta-b", cfg.theta_b, "Comma-separated B angles (radians), one per party");
  app.add_option("--symmetric", cfg.symmetric, "theta_a1,theta_b1,theta_a,theta_b");
  app.add_option("--samples", cfg.samples, "Certification samples")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->envname("MLOCAL_SEED")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads (0 = all cores)")
      ->envname("MLOCAL_WORKERS")
      ->capture_default_str();
  app.add_option("--format", cfg.format, "text, csv or structured");
  app.add_option("--output", cfg.output, "Write output to this file");
  app.add_option("--grid", cfg.optimizer.grid_resolution, "Grid points per angle")
      ->capture_default_str();
  app.add_option("--rounds", cfg.optimizer.refinement_rounds, "Compass step halvings")
      ->capture_default_str();
  app.add_option("--local-tol", cfg.optimizer.local_tolerance, "Compass stopping step")
      ->capture_default_str();
  app.add_option("--restarts", cfg.optimizer.restarts, "Grid points refined locally")
      ->capture_default_str();
  app.add_option("--bisection-tol", cfg.bisection_tolerance, "Threshold bracket width")
      ->capture_default_str();

  auto* build = app.add_subcommand("build", "Print the (m-1)-th inequality");
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate the inequality on a noisy state");
  auto* certify = app.add_subcommand("certify", "Check the classical bound numerically");
  auto* threshold = app.add_subcommand("threshold", "Visibility threshold for one (n, m)");
  auto* table = app.add_subcommand("table", "Visibility thresholds for whole table rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  log_environment_overrides();
  cfg.optimizer.rng_seed = cfg.seed;
  cfg.optimizer.workers = cfg.workers;

  try {
    if (build->parsed()) {
      if (cfg.format.empty()) cfg.format = "text";
      return cmd_build(cfg);
    }
    if (evaluate->parsed()) {
      if (cfg.format.empty()) cfg.format = "text";
      return cmd_evaluate(cfg);
    }
    if (certify->parsed()) {
      if (cfg.format.empty()) cfg.format = "text";
      return cmd_certify(cfg);
    }
    if (cfg.format.empty()) cfg.format = "csv";
    if (threshold->parsed()) return cmd_threshold(cfg);
    if (table->parsed()) return cmd_table(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mlocal::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mlocal::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mlocal::NoViolation& e) {
    std::cerr << "finding: " << e.what() << "\n";
    return kExitFinding;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return kExitFinding;
  }
  return kExitUsage;
}
