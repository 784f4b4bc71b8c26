#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "roadprio/errors.hpp"

namespace roadprio {

struct EvaluationReport {
  std::string campaign;
  std::size_t total_tests = 0;
  std::size_t failed_tests = 0;
  std::size_t selected_count = 0;
  double reduction_pct = 0.0;
  std::optional<double> frr_pct;
  std::map<std::size_t, double> efd_at_k;
  std::map<std::size_t, double> efd_random_expected;
  std::map<std::size_t, double> efd_random_mc;
  std::optional<double> apfd;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
};

struct OverlapReport {
  std::set<std::string> failures_a;
  std::set<std::string> failures_b;
  std::size_t intersection_size = 0;
  std::size_t union_size = 0;
  double jaccard_pct = 0.0;
};

/// Percentage of tests eliminated from the original suite.
inline double reduction_ratio(std::size_t total, std::size_t selected) {
  if (total == 0) fail(errc::empty_suite, "reduction over an empty suite");
  if (selected > total) {
    fail(errc::invalid_argument, "selected count exceeds total");
  }
  return 100.0 * static_cast<double>(total - selected) /
         static_cast<double>(total);
}

/// Percentage of all failing tests that appear in the selection.
inline double failed_retention(const std::set<std::string>& selected,
                               const std::set<std::string>& failures) {
  if (failures.empty()) {
    fail(errc::no_failures, "failed_retention is undefined without failures");
  }
  std::size_t hits = 0;
  for (const std::string& f : failures) hits += selected.count(f);
  return 100.0 * static_cast<double>(hits) /
         static_cast<double>(failures.size());
}

/// Percentage of all failing tests among the first k executed tests.
inline double efd_at_k(std::span<const std::string> order,
                       const std::set<std::string>& failures, std::size_t k) {
  if (failures.empty()) {
    fail(errc::no_failures, "efd_at_k is undefined without failures");
  }
  if (k > order.size()) {
    fail(errc::invalid_argument, "k exceeds the number of ranked tests");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += failures.count(order[i]);
  return 100.0 * static_cast<double>(hits) /
         static_cast<double>(failures.size());
}

namespace detail {

/// Unbiased bounded draw; self-contained so sequences are stable across
/// standard library implementations.
inline std::uint64_t bounded_rand(std::mt19937_64& eng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = eng();
    if (r >= threshold) return r % bound;
  }
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic shuffle built on bounded_rand (Fisher-Yates).
template <typename T>
inline void seeded_shuffle(std::vector<T>& values, std::mt19937_64& eng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_rand(eng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace detail

struct RandomEfd {
  double expected_pct = 0.0;     // analytic hypergeometric expectation
  double monte_carlo_pct = 0.0;  // seeded shuffle average
};

/// Random-ordering EFD baseline. The expected fraction of failures in a
/// random prefix of length k is k/n; the Monte Carlo estimate averages
/// seeded trials with per-trial derived seeds summed in trial order.
inline RandomEfd efd_random(std::size_t n, std::size_t m, std::size_t k,
                            std::size_t trials, std::uint64_t seed) {
  if (n == 0) fail(errc::empty_suite, "efd_random over an empty suite");
  if (m > n || k > n) {
    fail(errc::invalid_argument, "efd_random requires m <= n and k <= n");
  }
  RandomEfd result;
  result.expected_pct = 100.0 * static_cast<double>(k) / static_cast<double>(n);
  if (trials == 0 || m == 0) {
    result.monte_carlo_pct = m == 0 ? 0.0 : result.expected_pct;
    return result;
  }
  double sum = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::mt19937_64 eng(detail::mix_seed(seed, trial));
    // Partial Fisher-Yates: draw the k-prefix of a random permutation of
    // 0..n-1 and count indices below m (the failing tests).
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(detail::bounded_rand(eng, n - i));
      std::swap(pool[i], pool[j]);
      if (pool[i] < m) ++hits;
    }
    sum += 100.0 * static_cast<double>(hits) / static_cast<double>(m);
  }
  result.monte_carlo_pct = sum / static_cast<double>(trials);
  return result;
}

/// APFD with one fault per failed test: TF_i is the 1-based position of
/// failed test i in the order.
inline double apfd(std::span<const std::string> order,
                   const std::set<std::string>& failures) {
  if (failures.empty()) {
    fail(errc::no_failures, "apfd is undefined without failures");
  }
  const std::size_t n = order.size();
  std::uint64_t tf_sum = 0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (failures.count(order[i])) {
      tf_sum += static_cast<std::uint64_t>(i + 1);
      ++found;
    }
  }
  if (found != failures.size()) {
    fail(errc::invalid_argument, "failures must all appear in the order");
  }
  const double nm = static_cast<double>(n) * static_cast<double>(failures.size());
  return 1.0 - static_cast<double>(tf_sum) / nm +
         1.0 / (2.0 * static_cast<double>(n));
}

/// Failure overlap between two models as a Jaccard percentage (0 when both
/// sets are empty).
inline OverlapReport cross_model_overlap(const std::set<std::string>& failures_a,
                                         const std::set<std::string>& failures_b) {
  OverlapReport report;
  report.failures_a = failures_a;
  report.failures_b = failures_b;
  for (const std::string& f : failures_a) {
    if (failures_b.count(f)) ++report.intersection_size;
  }
  report.union_size =
      failures_a.size() + failures_b.size() - report.intersection_size;
  report.jaccard_pct =
      report.union_size == 0
          ? 0.0
          : 100.0 * static_cast<double>(report.intersection_size) /
                static_cast<double>(report.union_size);
  return report;
}

/// Full effectiveness report over a ranked order and its outcomes.
inline EvaluationReport evaluate_ranking(const std::string& campaign,
                                         std::span<const std::string> order,
                                         const std::set<std::string>& selected,
                                         const std::set<std::string>& failures,
                                         const std::vector<std::size_t>& ks,
                                         std::size_t trials, std::uint64_t seed) {
  EvaluationReport report;
  report.campaign = campaign;
  report.total_tests = order.size();
  report.failed_tests = failures.size();
  report.selected_count = selected.size();
  report.reduction_pct = reduction_ratio(order.size(), selected.size());
  report.seed = seed;
  report.trials = trials;
  if (!failures.empty()) {
    report.frr_pct = failed_retention(selected, failures);
    report.apfd = apfd(order, failures);
  }
  for (std::size_t k : ks) {
    if (k > order.size()) {
      fail(errc::invalid_argument,
           "k = " + std::to_string(k) + " exceeds the suite size");
    }
    const RandomEfd rnd = efd_random(order.size(), failures.size(), k, trials,
                                     seed);
    report.efd_random_expected[k] = rnd.expected_pct;
    report.efd_random_mc[k] = rnd.monte_carlo_pct;
    if (!failures.empty()) {
      report.efd_at_k[k] = efd_at_k(order, failures, k);
    }
  }
  return report;
}

}  // namespace roadprio
