#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "roadprio/dynamics.hpp"
#include "roadprio/errors.hpp"
#include "roadprio/geometry.hpp"
#include "roadprio/selection.hpp"

namespace roadprio {

struct PriorityParams {
  double alpha = 0.5;          // weight of the geometric score
  double beta = 0.5;           // weight of the dynamic score
  double failure_bonus = 0.25; // added for previously failed tests
  double kappa_thr = 0.015;    // 1/m, high-curvature section threshold
  double w_cv = 1.0 / 3.0;
  double w_hc = 1.0 / 3.0;
  double w_dt = 1.0 / 3.0;

  void validate() const {
    if (std::abs(alpha + beta - 1.0) > 1e-9) {
      fail(errc::invalid_argument, "alpha + beta must equal 1");
    }
    if (!(failure_bonus >= 0.1 && failure_bonus <= 0.5)) {
      fail(errc::invalid_argument, "failure_bonus must be in [0.1, 0.5]");
    }
    if (std::abs(w_cv + w_hc + w_dt - 1.0) > 1e-9) {
      fail(errc::invalid_argument, "w_cv + w_hc + w_dt must equal 1");
    }
    if (!(kappa_thr > 0.0)) {
      fail(errc::invalid_argument, "kappa_thr must be > 0");
    }
  }
};

/// Raw geometric complexity components of one test before campaign-wide
/// normalization.
struct GeometricRaw {
  double sigma_curv = 0.0;              // sigma over the full signed profile
  std::size_t high_curvature_sections = 0;
  std::size_t distinct_types = 1;       // 1..3
};

struct TestScore {
  std::string test_id;
  double g = 0.0;
  double d = 0.0;
  double h = 0.0;
  double p = 0.0;
};

struct RankedSuite {
  std::vector<TestScore> covered_order;
  std::vector<TestScore> surplus_order;
};

/// Raw components from a segmented road. The concatenated section curvature
/// sequences reproduce the road's full interior profile.
inline GeometricRaw geometric_score_raw(std::span<const Section> road_sections,
                                        const PriorityParams& params) {
  params.validate();
  std::vector<double> profile;
  std::set<ShapeLabel> types;
  GeometricRaw raw;
  for (const Section& section : road_sections) {
    profile.insert(profile.end(), section.curvature_seq.begin(),
                   section.curvature_seq.end());
    types.insert(section.shape);
    if (section.mean_abs_curvature() > params.kappa_thr) {
      ++raw.high_curvature_sections;
    }
  }
  raw.sigma_curv = population_stddev(profile);
  raw.distinct_types = std::max<std::size_t>(types.size(), 1);
  return raw;
}

/// Campaign-normalized geometric scores: each component min-max scaled over
/// all tests, then combined with the w_cv/w_hc/w_dt weights.
inline std::vector<double> geometric_score(std::span<const GeometricRaw> raws,
                                           const PriorityParams& params) {
  params.validate();
  if (raws.empty()) return {};
  auto minmax = [&](auto getter) {
    std::vector<double> scaled(raws.size(), 0.0);
    double lo = getter(raws[0]);
    double hi = lo;
    for (const GeometricRaw& r : raws) {
      lo = std::min(lo, getter(r));
      hi = std::max(hi, getter(r));
    }
    const double span = hi - lo;
    if (span > 0.0) {
      for (std::size_t i = 0; i < raws.size(); ++i) {
        scaled[i] = (getter(raws[i]) - lo) / span;
      }
    }
    return scaled;
  };
  const auto cv = minmax([](const GeometricRaw& r) { return r.sigma_curv; });
  const auto hc = minmax([](const GeometricRaw& r) {
    return static_cast<double>(r.high_curvature_sections);
  });
  const auto dt = minmax([](const GeometricRaw& r) {
    return static_cast<double>(r.distinct_types);
  });
  std::vector<double> g(raws.size());
  for (std::size_t i = 0; i < raws.size(); ++i) {
    g[i] = params.w_cv * cv[i] + params.w_hc * hc[i] + params.w_dt * dt[i];
  }
  return g;
}

/// Scenario difficulty: the mean of the four normalized indicators.
inline double dynamic_score(const DynamicProfile& profile) {
  if (!profile.normalized) {
    fail(errc::not_normalized, "dynamic_score requires a normalized profile");
  }
  const auto ind = profile.indicators();
  return (ind[0] + ind[1] + ind[2] + ind[3]) / 4.0;
}

/// failure_bonus for tests with a recorded prior failure; absent history
/// counts as no failure.
inline double historical_score(const std::optional<TestOutcome>& outcome,
                               const PriorityParams& params) {
  params.validate();
  if (outcome.has_value() && outcome->failed) return params.failure_bonus;
  return 0.0;
}

inline TestScore make_test_score(std::string test_id, double g, double d,
                                 double h, const PriorityParams& params) {
  params.validate();
  TestScore score;
  score.test_id = std::move(test_id);
  score.g = g;
  score.d = d;
  score.h = h;
  score.p = params.alpha * g + params.beta * d + h;
  return score;
}

/// Final execution order: covered tests first, each group sorted by
/// descending total score with ties broken by ascending test id.
inline RankedSuite rank(const SuiteSplit& split,
                        const std::unordered_map<std::string, TestScore>& scores) {
  auto collect = [&](const std::vector<std::string>& ids) {
    std::vector<TestScore> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) {
      auto it = scores.find(id);
      if (it == scores.end()) {
        fail(errc::missing_score, "no score for test '" + id + "'");
      }
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end(), [](const TestScore& a, const TestScore& b) {
      if (a.p != b.p) return a.p > b.p;
      return a.test_id < b.test_id;
    });
    return out;
  };
  RankedSuite ranked;
  ranked.covered_order = collect(split.covered);
  ranked.surplus_order = collect(split.surplus);
  return ranked;
}

/// Flattened execution order, covered block first.
inline std::vector<std::string> execution_order(const RankedSuite& ranked) {
  std::vector<std::string> order;
  order.reserve(ranked.covered_order.size() + ranked.surplus_order.size());
  for (const TestScore& s : ranked.covered_order) order.push_back(s.test_id);
  for (const TestScore& s : ranked.surplus_order) order.push_back(s.test_id);
  return order;
}

}  // namespace roadprio
