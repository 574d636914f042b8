#ifndef CGBENCH_METRICS_HPP
#define CGBENCH_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cgbench/error.hpp"
#include "cgbench/merge.hpp"

namespace cgbench {

// ------------------------------------------------------------- percentages

/// Rounds 100*num/den to the nearest integer, halves away from zero, in
/// exact integer arithmetic. Zero denominator yields 0.
inline long long percent_int(long long num, long long den) {
  if (den == 0) return 0;
  return (200 * num + den) / (2 * den);
}

/// Rounds 100*num/den to one decimal and renders it ("57.2"). Zero
/// denominator yields "0.0".
inline std::string percent_one_decimal(long long num, long long den) {
  long long tenths = den == 0 ? 0 : (2000 * num + den) / (2 * den);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

// ------------------------------------------------------ combination stats

/// Precision/recall/F-score of one tool combination under union semantics:
/// an edge counts for the combination when at least one member reports it.
struct CombinationStats {
  std::vector<std::string> combination;
  long long tp = 0;       // validated-true edges found by the combination
  long long all = 0;      // edges found by the combination
  long long tpstar = 0;   // validated-true edges in the whole union

  double precision() const { return all == 0 ? 0.0 : double(tp) / double(all); }
  double recall() const { return tpstar == 0 ? 0.0 : double(tp) / double(tpstar); }
  double f_score() const {
    return (all + tpstar) == 0 ? 0.0 : 2.0 * double(tp) / double(all + tpstar);
  }

  // 2PR/(P+R) == 2*TP/(All+TP*), so the rounded percents stay exact.
  long long precision_pct() const { return percent_int(tp, all); }
  long long recall_pct() const { return percent_int(tp, tpstar); }
  long long f_pct() const { return percent_int(2 * tp, all + tpstar); }

  std::string name() const {
    std::string out;
    for (const std::string& t : combination) {
      if (!out.empty()) out += "+";
      out += t;
    }
    return out;
  }
};

/// Computes the full combination table for a validated union graph: one row
/// per non-empty tool subset, ordered by subset size then lexicographically.
/// Every edge must carry a verdict (UNVALIDATED_EDGES otherwise).
inline std::vector<CombinationStats> combination_stats(const MergedGraph& m) {
  std::vector<EdgeKeyPair> missing;
  for (const MergedEdge& e : m.edges())
    if (!e.valid) missing.push_back(m.edge_key(e));
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    std::string msg = std::to_string(missing.size()) +
                      " edge(s) lack a verdict, first: " +
                      missing.front().first.to_string() + " -> " +
                      missing.front().second.to_string();
    throw Error(Errc::unvalidated_edges, msg);
  }
  long long tpstar = 0;
  for (const MergedEdge& e : m.edges())
    if (*e.valid) ++tpstar;
  std::vector<CombinationStats> out;
  for (std::vector<std::string>& combo :
       detail::enumerate_combinations(m.tool_ids())) {
    CombinationStats row;
    row.tpstar = tpstar;
    for (const MergedEdge& e : m.edges()) {
      bool found = false;
      for (const std::string& t : combo)
        if (std::binary_search(e.tools.begin(), e.tools.end(), t)) {
          found = true;
          break;
        }
      if (!found) continue;
      ++row.all;
      if (*e.valid) ++row.tp;
    }
    row.combination = std::move(combo);
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string stats_csv(const std::vector<CombinationStats>& rows) {
  std::string out = "combination,TP,All,TPstar,precision_pct,recall_pct,f_pct\n";
  for (const CombinationStats& r : rows) {
    out += r.name() + "," + std::to_string(r.tp) + "," + std::to_string(r.all) +
           "," + std::to_string(r.tpstar) + "," +
           std::to_string(r.precision_pct()) + "," +
           std::to_string(r.recall_pct()) + "," + std::to_string(r.f_pct()) +
           "\n";
  }
  return out;
}

/// Column-aligned table for terminals.
inline std::string stats_table(const std::vector<CombinationStats>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"combination", "TP", "All", "TP*", "P%", "R%", "F%"});
  for (const CombinationStats& r : rows)
    cells.push_back({r.name(), std::to_string(r.tp), std::to_string(r.all),
                     std::to_string(r.tpstar), std::to_string(r.precision_pct()),
                     std::to_string(r.recall_pct()), std::to_string(r.f_pct())});
  std::vector<size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : cells) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out += row[c];
        out.append(width[c] - row[c].size(), ' ');
      } else {
        out += "  ";
        out.append(width[c] - row[c].size(), ' ');
        out += row[c];
      }
    }
    out += "\n";
  }
  return out;
}

// ------------------------------------------------------------- sample size

/// Cochran's sample size with finite-population correction:
/// n0 = z^2 p (1-p) / e^2, adjusted by n0 / (1 + (n0-1)/N), rounded to the
/// nearest integer and capped at N.
struct SampleSizeQuery {
  long long population = 0;
  double z = 1.96;       // 95% confidence
  double error = 0.05;   // +/-5% margin
  double p = 0.5;        // maximal-variance prior
};

inline long long sample_size(const SampleSizeQuery& q) {
  if (q.population < 0) throw Error(Errc::usage, "population must be >= 0");
  if (!(q.error > 0) || !(q.p > 0) || !(q.p < 1) || !(q.z > 0))
    throw Error(Errc::usage, "invalid sample-size parameters");
  if (q.population == 0) return 0;
  double n0 = q.z * q.z * q.p * (1.0 - q.p) / (q.error * q.error);
  double adjusted = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(q.population));
  long long n = std::llround(adjusted);
  return std::min(n, q.population);
}

// ------------------------------------------------------------ edge samples

namespace detail {

/// Uniform integer in [0, bound) drawn by rejection from the top 64-bit
/// range, so results do not depend on a library's distribution internals.
inline uint64_t bounded_uniform(std::mt19937_64& rng, uint64_t bound) {
  if (bound == 0) return 0;
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

}  // namespace detail

/// Draws `n` distinct edges uniformly from the region of the union reported
/// by exactly `combination` (a subset of the universe). The draw is seeded
/// and deterministic; the result is sorted by edge key. Asking for more edges
/// than the region holds is SAMPLE_TOO_LARGE.
inline std::vector<EdgeKeyPair> sample_edges(
    const MergedGraph& m, const std::vector<std::string>& combination,
    long long n, uint64_t seed) {
  std::vector<std::string> want;
  for (const std::string& t : combination) want.push_back(tool_id(t));
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  std::vector<EdgeKeyPair> region;
  for (const MergedEdge& e : m.edges())
    if (e.tools == want) region.push_back(m.edge_key(e));
  std::sort(region.begin(), region.end());
  if (n < 0) throw Error(Errc::usage, "sample size must be >= 0");
  if (n > static_cast<long long>(region.size()))
    throw Error(Errc::sample_too_large,
                "requested " + std::to_string(n) + " edges from a region of " +
                    std::to_string(region.size()));
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates over the canonical ordering.
  for (long long i = 0; i < n; ++i) {
    uint64_t j = static_cast<uint64_t>(i) +
                 detail::bounded_uniform(rng, region.size() - static_cast<uint64_t>(i));
    std::swap(region[static_cast<size_t>(i)], region[static_cast<size_t>(j)]);
  }
  region.resize(static_cast<size_t>(n));
  std::sort(region.begin(), region.end());
  return region;
}

// ------------------------------------------------------ proportion summary

/// Extrapolates a validated sample back to its region: `estimate` is the
/// projected number of true edges, `percent_text` the sample proportion with
/// two decimals, truncated (never rounded up).
struct ProportionSummary {
  long long true_count = 0;
  long long sample_size = 0;
  long long population = 0;
  double estimate = 0.0;
  std::string percent_text;
};

inline ProportionSummary proportion_summary(long long true_count,
                                            long long sample, long long population) {
  if (true_count < 0 || sample < 0 || population < 0 || true_count > sample ||
      sample > population)
    throw Error(Errc::usage, "need 0 <= true <= sample <= population");
  ProportionSummary s;
  s.true_count = true_count;
  s.sample_size = sample;
  s.population = population;
  s.estimate = sample == 0
                   ? 0.0
                   : double(true_count) / double(sample) * double(population);
  long long basis = sample == 0 ? 0 : (true_count * 10000) / sample;
  std::string frac = std::to_string(basis % 100);
  if (frac.size() < 2) frac.insert(frac.begin(), '0');
  s.percent_text = std::to_string(basis / 100) + "." + frac;
  return s;
}

}  // namespace cgbench

#endif  // CGBENCH_METRICS_HPP
