#include "mlocal/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mlocal/parallel.hpp"
#include "mlocal/random.hpp"
#include "mlocal/simplex.hpp"

namespace mlocal {
namespace {

constexpr int kMaxVertexBlock = 3;

std::uint32_t extract_bits(std::uint32_t word, std::span<const int> positions, int width) {
  std::uint32_t out = 0;
  for (int pos : positions) out = (out << 1) | ((word >> (width - 1 - pos)) & 1u);
  return out;
}

// Restricted growth strings with exactly m distinct labels.
void grow_partitions(std::vector<int>& labels, int next, int used, int n, int m,
                     std::vector<Partition>& out) {
  if (n - next < m - used) return;
  if (next == n) {
    Partition p;
    p.blocks.resize(m);
    for (int k = 0; k < n; ++k) p.blocks[labels[k]].push_back(k + 1);
    p.canonicalize();
    out.push_back(std::move(p));
    return;
  }
  for (int label = 0; label <= std::min(used, m - 1); ++label) {
    labels[next] = label;
    grow_partitions(labels, next + 1, std::max(used, label + 1), n, m, out);
  }
}

lp::LinearProgram nonsignaling_program(int size) {
  const std::uint32_t rows = 1u << size;
  lp::LinearProgram program;
  program.variables = static_cast<std::size_t>(rows) * rows;
  program.objective.assign(program.variables, 0.0);
  const auto var = [rows](std::uint32_t s, std::uint32_t o) {
    return static_cast<std::size_t>(s) * rows + o;
  };

  for (std::uint32_t s = 0; s < rows; ++s) {
    std::vector<double> row(program.variables, 0.0);
    for (std::uint32_t o = 0; o < rows; ++o) row[var(s, o)] = 1.0;
    program.rows.push_back(std::move(row));
    program.rhs.push_back(1.0);
  }

  for (int j = 0; j < size; ++j) {
    const std::uint32_t bit = 1u << (size - 1 - j);
    for (std::uint32_t s = 0; s < rows; ++s) {
      if (s & bit) continue;
      for (std::uint32_t o = 0; o < rows; ++o) {
        if (o & bit) continue;
        std::vector<double> row(program.variables, 0.0);
        row[var(s, o)] += 1.0;
        row[var(s, o | bit)] += 1.0;
        row[var(s | bit, o)] -= 1.0;
        row[var(s | bit, o | bit)] -= 1.0;
        program.rows.push_back(std::move(row));
        program.rhs.push_back(0.0);
      }
    }
  }
  return program;
}

const lp::LinearProgram& cached_program(int size) {
  static const std::vector<lp::LinearProgram> programs = [] {
    std::vector<lp::LinearProgram> v;
    v.emplace_back();
    for (int s = 1; s <= kMaxVertexBlock; ++s) v.push_back(nonsignaling_program(s));
    return v;
  }();
  return programs[size];
}

std::vector<double> random_weights(std::size_t count, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp(1.0);
  std::vector<double> w(count);
  for (double& x : w) x = exp(rng) + 1e-12;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

ConditionalDistribution sample_large_block(const std::vector<int>& parties, std::mt19937_64& rng) {
  // Products of vertices over random sub-blocks of at most three parties.
  std::uniform_int_distribution<int> components(1, 3);
  std::uniform_int_distribution<int> chunk(1, kMaxVertexBlock);
  const int count = components(rng);
  std::vector<ConditionalDistribution> parts;
  for (int c = 0; c < count; ++c) {
    std::vector<int> order = parties;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<ConditionalDistribution> factors;
    for (std::size_t pos = 0; pos < order.size();) {
      const std::size_t len = std::min<std::size_t>(chunk(rng), order.size() - pos);
      std::vector<int> sub(order.begin() + static_cast<std::ptrdiff_t>(pos),
                           order.begin() + static_cast<std::ptrdiff_t>(pos + len));
      std::sort(sub.begin(), sub.end());
      factors.push_back(nonsignaling_vertex(std::move(sub), rng));
      pos += len;
    }
    parts.push_back(product_of(factors));
  }
  if (parts.size() == 1) return std::move(parts.front());
  const auto w = random_weights(parts.size(), rng);
  return mix(parts, w);
}

}  // namespace

int strategy_lhs(const BellExpression& expr, const DeterministicStrategy& strategy) {
  if (expr.n != strategy.n) {
    throw DimensionMismatch("strategy has n=" + std::to_string(strategy.n) +
                            ", expression has n=" + std::to_string(expr.n));
  }
  int lhs = 0;
  for (const Term& t : expr.terms) {
    if (strategy.outcomes_for(t.setting_mask()) == t.outcome_mask()) lhs += t.coefficient;
  }
  return lhs;
}

int max_deterministic_lhs(const BellExpression& expr) {
  // Masks once per term; this loop runs 4^n times.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;
  for (const Term& t : expr.terms) masks.emplace_back(t.setting_mask(), t.outcome_mask());
  int best = std::numeric_limits<int>::min();
  for (const DeterministicStrategy s : enumerate_strategies(expr.n)) {
    int lhs = 0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if (s.outcomes_for(masks[i].first) == masks[i].second) lhs += expr.terms[i].coefficient;
    }
    best = std::max(best, lhs);
  }
  return best;
}

ConditionalDistribution indicator_distribution(const DeterministicStrategy& strategy) {
  std::vector<int> parties(strategy.n);
  std::iota(parties.begin(), parties.end(), 1);
  const std::uint32_t rows = 1u << strategy.n;
  std::vector<double> table(static_cast<std::size_t>(rows) * rows, 0.0);
  for (std::uint32_t s = 0; s < rows; ++s) {
    table[static_cast<std::size_t>(s) * rows + strategy.outcomes_for(s)] = 1.0;
  }
  return ConditionalDistribution(std::move(parties), std::move(table));
}

void Partition::canonicalize() {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x.front() < y.front();
  });
}

int Partition::parties() const {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  return static_cast<int>(total);
}

void Partition::validate() const {
  const int n = parties();
  std::vector<bool> seen(n + 1, false);
  for (const auto& b : blocks) {
    if (b.empty()) throw DomainError("partition has an empty block");
    for (int k : b) {
      if (k < 1 || k > n || seen[k]) throw DomainError("partition blocks do not cover 1..n");
      seen[k] = true;
    }
  }
}

std::vector<Partition> enumerate_partitions(int n, int m) {
  if (n < 2 || n > kMaxEnumerationParties) {
    throw DomainError("partition enumeration requires 2 <= n <= " +
                      std::to_string(kMaxEnumerationParties));
  }
  if (m < 2 || m > n) throw DomainError("block count m must satisfy 2 <= m <= n");
  std::vector<Partition> out;
  std::vector<int> labels(n, 0);
  grow_partitions(labels, 1, 1, n, m, out);
  return out;
}

nlohmann::json to_json(const Partition& partition) { return partition.blocks; }

NonsignalingReport check_nonsignaling(const ConditionalDistribution& dist) {
  NonsignalingReport report;
  const int size = dist.size();
  if (size < 2) return report;
  const std::uint32_t rows = 1u << size;
  for (int j = 0; j < size; ++j) {
    const std::uint32_t bit = 1u << (size - 1 - j);
    for (std::uint32_t s = 0; s < rows; ++s) {
      if (s & bit) continue;
      for (std::uint32_t o = 0; o < rows; ++o) {
        if (o & bit) continue;
        const double with_a = dist.at(s, o) + dist.at(s, o | bit);
        const double with_b = dist.at(s | bit, o) + dist.at(s | bit, o | bit);
        report.max_violation = std::max(report.max_violation, std::abs(with_a - with_b));
      }
    }
  }
  report.nonsignaling = report.max_violation <= kBoundTolerance;
  return report;
}

ConditionalDistribution nonsignaling_vertex(std::vector<int> parties, std::mt19937_64& rng) {
  const int size = static_cast<int>(parties.size());
  if (size < 1 || size > kMaxVertexBlock) {
    throw DomainError("vertex sampling supports blocks of 1 to 3 parties");
  }
  lp::LinearProgram program = cached_program(size);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& c : program.objective) c = gauss(rng);
  const lp::Solution solution = lp::maximize(program, kBoundTolerance);
  if (solution.status != lp::Status::Optimal) {
    throw std::logic_error("nonsignaling polytope LP did not reach an optimum");
  }
  ConditionalDistribution dist(std::move(parties), solution.x);
  dist.clamp_and_renormalize();
  return dist;
}

ConditionalDistribution sample_nonsignaling_block(std::vector<int> parties, std::mt19937_64& rng) {
  if (parties.empty()) throw DomainError("cannot sample an empty block");
  if (static_cast<int>(parties.size()) > kMaxVertexBlock) return sample_large_block(parties, rng);

  // Half single vertices, half mixtures of two to four vertices.
  std::bernoulli_distribution mixture(0.5);
  if (!mixture(rng)) return nonsignaling_vertex(std::move(parties), rng);
  std::uniform_int_distribution<int> count(2, 4);
  const int vertices = count(rng);
  std::vector<ConditionalDistribution> parts;
  for (int v = 0; v < vertices; ++v) parts.push_back(nonsignaling_vertex(parties, rng));
  const auto w = random_weights(parts.size(), rng);
  return mix(parts, w);
}

ConditionalDistribution sample_nonsignaling_block(int size, std::uint64_t seed) {
  if (size < 1) throw DomainError("block size must be positive");
  std::vector<int> parties(size);
  std::iota(parties.begin(), parties.end(), 1);
  auto rng = split_stream(seed, 0);
  return sample_nonsignaling_block(std::move(parties), rng);
}

ConditionalDistribution mix(std::span<const ConditionalDistribution> parts,
                            std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    throw DimensionMismatch("mixture needs one weight per component");
  }
  std::vector<double> table(parts.front().table().size(), 0.0);
  for (std::size_t c = 0; c < parts.size(); ++c) {
    if (!std::ranges::equal(parts[c].parties(), parts.front().parties())) {
      throw DimensionMismatch("mixture components cover different parties");
    }
    const auto src = parts[c].table();
    for (std::size_t i = 0; i < table.size(); ++i) table[i] += weights[c] * src[i];
  }
  const auto p = parts.front().parties();
  return ConditionalDistribution(std::vector<int>(p.begin(), p.end()), std::move(table));
}

ConditionalDistribution product_of(std::span<const ConditionalDistribution> blocks) {
  std::vector<int> parties;
  for (const auto& b : blocks) parties.insert(parties.end(), b.parties().begin(), b.parties().end());
  std::sort(parties.begin(), parties.end());
  if (std::adjacent_find(parties.begin(), parties.end()) != parties.end()) {
    throw DimensionMismatch("product factors share a party");
  }
  const int width = static_cast<int>(parties.size());

  std::vector<std::vector<int>> positions;
  for (const auto& b : blocks) {
    std::vector<int> pos;
    for (int party : b.parties()) {
      pos.push_back(static_cast<int>(std::lower_bound(parties.begin(), parties.end(), party) -
                                     parties.begin()));
    }
    positions.push_back(std::move(pos));
  }

  const std::uint32_t rows = 1u << width;
  std::vector<double> table(static_cast<std::size_t>(rows) * rows);
  for (std::uint32_t s = 0; s < rows; ++s) {
    for (std::uint32_t o = 0; o < rows; ++o) {
      double value = 1.0;
      for (std::size_t b = 0; b < blocks.size() && value != 0.0; ++b) {
        value *= blocks[b].at(extract_bits(s, positions[b], width),
                              extract_bits(o, positions[b], width));
      }
      table[static_cast<std::size_t>(s) * rows + o] = value;
    }
  }
  return ConditionalDistribution(std::move(parties), std::move(table));
}

ConditionalDistribution product_distribution(const Partition& partition,
                                             std::span<const ConditionalDistribution> blocks) {
  partition.validate();
  if (partition.blocks.size() != blocks.size()) {
    throw DimensionMismatch("partition has " + std::to_string(partition.blocks.size()) +
                            " blocks, got " + std::to_string(blocks.size()) + " distributions");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!std::ranges::equal(blocks[i].parties(), partition.blocks[i])) {
      throw DimensionMismatch("distribution " + std::to_string(i) +
                              " does not cover its partition block");
    }
  }
  return product_of(blocks);
}

double distribution_lhs(const BellExpression& expr, const ConditionalDistribution& dist) {
  if (dist.size() != expr.n) {
    throw DimensionMismatch("behavior covers " + std::to_string(dist.size()) +
                            " parties, expression has n=" + std::to_string(expr.n));
  }
  double lhs = 0.0;
  for (const Term& t : expr.terms) lhs += t.coefficient * dist.at(t.setting_mask(), t.outcome_mask());
  return lhs;
}

CertificationReport certify_m_local_bound(const BellExpression& expr, std::size_t samples,
                                          std::uint64_t seed, unsigned workers) {
  validate(expr);
  if (samples == 0) throw DomainError("certification needs at least one sample");
  const std::vector<Partition> partitions = enumerate_partitions(expr.n, expr.m);

  std::vector<double> values(samples);
  parallel_for(samples, workers, [&](std::size_t i) {
    auto rng = split_stream(seed, i);
    std::uniform_int_distribution<std::size_t> pick(0, partitions.size() - 1);
    const Partition& partition = partitions[pick(rng)];
    std::vector<ConditionalDistribution> blocks;
    for (const auto& b : partition.blocks) blocks.push_back(sample_nonsignaling_block(b, rng));
    values[i] = distribution_lhs(expr, product_distribution(partition, blocks));
  });

  CertificationReport report;
  report.samples = samples;
  report.seed = seed;
  report.max_lhs = *std::max_element(values.begin(), values.end());
  for (std::size_t i = 0; i < samples; ++i) {
    if (values[i] <= kBoundTolerance) continue;
    if (report.failures++ == 0) {
      // Replay the sample to recover its model for the failure dump.
      auto rng = split_stream(seed, i);
      std::uniform_int_distribution<std::size_t> pick(0, partitions.size() - 1);
      CertificationFailure failure;
      failure.sample = i;
      failure.lhs = values[i];
      failure.partition = partitions[pick(rng)];
      for (const auto& b : failure.partition.blocks) {
        failure.blocks.push_back(sample_nonsignaling_block(b, rng));
      }
      report.first_failure = std::move(failure);
    }
  }
  return report;
}

nlohmann::json to_json(const CertificationFailure& failure, const BellExpression& expr) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : failure.blocks) blocks.push_back(to_json(b));
  return {{"expression", to_json(expr)},
          {"sample", failure.sample},
          {"partition", to_json(failure.partition)},
          {"blocks", std::move(blocks)},
          {"lhs", failure.lhs}};
}

}  // namespace mlocal
