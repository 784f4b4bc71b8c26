#pragma once

// Shared test helpers: independent oracles for DTW, complete-linkage
// clustering and APFD, plus deterministic fixture builders. The oracles
// deliberately re-derive the definitions from scratch so they stay
// independent of the implementation paths they check.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "roadprio/clustering.hpp"
#include "roadprio/fixtures.hpp"
#include "roadprio/geometry.hpp"

namespace testsupport {

// ---------------------------------------------------------------------------
// Brute-force DTW: enumerate every monotone warping path, accumulate the
// clamped per-step costs in path order, keep the minimal total cost and the
// longest path achieving it.
// ---------------------------------------------------------------------------

namespace detail {

inline void dtw_walk(std::span<const double> a, std::span<const double> b,
                     double kappa_span, std::size_t i, std::size_t j,
                     double acc, std::size_t len, double& best_cost,
                     std::size_t& best_len) {
  double c = std::abs(a[i] - b[j]) / kappa_span;
  if (c > 1.0) c = 1.0;
  const double total = acc + c;
  const std::size_t steps = len + 1;
  if (i + 1 == a.size() && j + 1 == b.size()) {
    if (total < best_cost) {
      best_cost = total;
      best_len = steps;
    } else if (total == best_cost) {
      best_len = std::max(best_len, steps);
    }
    return;
  }
  if (i + 1 < a.size()) {
    dtw_walk(a, b, kappa_span, i + 1, j, total, steps, best_cost, best_len);
  }
  if (j + 1 < b.size()) {
    dtw_walk(a, b, kappa_span, i, j + 1, total, steps, best_cost, best_len);
  }
  if (i + 1 < a.size() && j + 1 < b.size()) {
    dtw_walk(a, b, kappa_span, i + 1, j + 1, total, steps, best_cost, best_len);
  }
}

}  // namespace detail

inline double brute_dtw_normalized(std::span<const double> a,
                                   std::span<const double> b,
                                   double kappa_span) {
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t best_len = 0;
  detail::dtw_walk(a, b, kappa_span, 0, 0, 0.0, 0, best_cost, best_len);
  if (best_cost == 0.0) return 0.0;
  return best_cost / static_cast<double>(best_len);
}

// ---------------------------------------------------------------------------
// Naive complete-linkage agglomeration: recompute every cluster-pair
// distance from the raw matrix at each step (no Lance-Williams updates).
// ---------------------------------------------------------------------------

inline double brute_mean_offdiag(const roadprio::DistanceMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += matrix.at(i, j);
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

inline std::vector<std::vector<std::string>> brute_complete_linkage(
    const roadprio::DistanceMatrix& matrix, double cut) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < matrix.size(); ++i) clusters.push_back({i});

  auto key_of = [&](const std::vector<std::size_t>& members) {
    std::string key = matrix.ids[members[0]];
    for (std::size_t m : members) key = std::min(key, matrix.ids[m]);
    return key;
  };

  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0;
    std::string best_lo, best_hi;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double d = 0.0;
        for (std::size_t i : clusters[a]) {
          for (std::size_t j : clusters[b]) d = std::max(d, matrix.at(i, j));
        }
        std::string lo = key_of(clusters[a]);
        std::string hi = key_of(clusters[b]);
        if (hi < lo) std::swap(lo, hi);
        const bool better =
            d < best ||
            (d == best && (lo < best_lo || (lo == best_lo && hi < best_hi)));
        if (better) {
          best = d;
          best_a = a;
          best_b = b;
          best_lo = lo;
          best_hi = hi;
        }
      }
    }
    if (best > cut) break;
    clusters[best_a].insert(clusters[best_a].end(), clusters[best_b].begin(),
                            clusters[best_b].end());
    clusters.erase(clusters.begin() + best_b);
  }

  std::vector<std::vector<std::string>> named;
  for (const auto& members : clusters) {
    std::vector<std::string> ids;
    for (std::size_t m : members) ids.push_back(matrix.ids[m]);
    std::sort(ids.begin(), ids.end());
    named.push_back(std::move(ids));
  }
  std::sort(named.begin(), named.end());
  return named;
}

// ---------------------------------------------------------------------------
// Brute-force APFD: mean normalized first-detection position per fault.
// ---------------------------------------------------------------------------

inline double brute_apfd(const std::vector<std::string>& order,
                         const std::set<std::string>& failures) {
  const double n = static_cast<double>(order.size());
  double mean_norm = 0.0;
  for (const std::string& fault : failures) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i] == fault) {
        pos = i + 1;
        break;
      }
    }
    mean_norm += static_cast<double>(pos) / n;
  }
  mean_norm /= static_cast<double>(failures.size());
  return 1.0 - mean_norm + 1.0 / (2.0 * n);
}

// ---------------------------------------------------------------------------
// Geometry fixtures
// ---------------------------------------------------------------------------

/// Points sampled on a circle. ccw = true traverses counterclockwise, which
/// makes a left curve.
inline roadprio::Road make_circle_road(const std::string& id, double radius,
                                       std::size_t n_points, double arc_span,
                                       bool ccw = true, double start_angle = 0.0,
                                       double cx = 0.0, double cy = 0.0) {
  roadprio::Road road;
  road.id = id;
  const double step = arc_span / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double a =
        start_angle + (ccw ? 1.0 : -1.0) * step * static_cast<double>(i);
    road.points.push_back({cx + radius * std::cos(a), cy + radius * std::sin(a)});
  }
  road.config.initial_position = road.points.front();
  road.config.initial_speed = 10.0;
  return road;
}

inline roadprio::Road make_straight_road(const std::string& id, double length,
                                         std::size_t n_points) {
  roadprio::Road road;
  road.id = id;
  const double step = length / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    road.points.push_back({step * static_cast<double>(i), 0.0});
  }
  road.config.initial_position = road.points.front();
  road.config.initial_speed = 10.0;
  return road;
}

inline roadprio::Section make_section(const std::string& id,
                                      roadprio::ShapeLabel shape,
                                      std::vector<double> curvature,
                                      double arc_length = 50.0,
                                      const std::string& road_id = "road") {
  roadprio::Section section;
  section.id = id;
  section.road_id = road_id;
  section.shape = shape;
  section.start_index = 0;
  section.end_index = curvature.size() + 1;
  section.curvature_seq = std::move(curvature);
  section.arc_length = arc_length;
  return section;
}

/// Random symmetric distance matrix with zero diagonal and entries in [0,1].
inline roadprio::DistanceMatrix random_matrix(std::mt19937_64& eng,
                                              std::size_t n) {
  roadprio::DistanceMatrix matrix;
  for (std::size_t i = 0; i < n; ++i) {
    matrix.ids.push_back("s" + std::to_string(i));
  }
  matrix.values.assign(n * n, 0.0);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) matrix.set(i, j, dist(eng));
  }
  return matrix;
}

// ---------------------------------------------------------------------------
// Synthetic campaign specs shared by the fixture, CLI and acceptance tests.
// ---------------------------------------------------------------------------

/// Eight-template campaign: one straight, two gentle curves above the 40 m
/// failure radius, five sharp curves below it. Twelve base roads duplicated
/// five times gives 60 roads; exactly the ten copies of the two sharp bases
/// fail under the radius rule, and each failing base crosses three distinct
/// sharp geometries.
inline roadprio::SynthCampaignSpec standard_campaign_spec(
    std::uint64_t seed = 2025) {
  using roadprio::ShapeLabel;
  roadprio::SynthCampaignSpec spec;
  spec.name = "synth60";
  spec.seed = seed;
  spec.duplicate_factor = 5;
  spec.initial_speed = 12.0;
  spec.instability_min = 0.2;
  spec.instability_max = 2.0;
  auto straight = [](const char* id, double length) {
    roadprio::TemplateSpec t;
    t.id = id;
    t.shape = ShapeLabel::Straight;
    t.length = length;
    return t;
  };
  auto curve = [](const char* id, ShapeLabel shape, double radius, double angle) {
    roadprio::TemplateSpec t;
    t.id = id;
    t.shape = shape;
    t.radius = radius;
    t.arc_angle = angle;
    return t;
  };
  spec.templates = {
      straight("s60", 60.0),
      curve("gl57", ShapeLabel::LeftCurve, 57.0, 1.2),
      curve("gr57", ShapeLabel::RightCurve, 57.0, 1.2),
      curve("xl15", ShapeLabel::LeftCurve, 15.0, 1.4),
      curve("xr16", ShapeLabel::RightCurve, 16.0, 1.4),
      curve("xl20", ShapeLabel::LeftCurve, 20.0, 1.2),
      curve("xr21", ShapeLabel::RightCurve, 21.0, 1.2),
      curve("xl26", ShapeLabel::LeftCurve, 26.0, 1.1),
  };
  spec.roads = {
      {"s60", "s60"},
      {"s60"},
      {"s60", "gr57", "s60"},
      {"s60", "gl57", "s60"},
      {"s60", "gr57", "s60", "gl57"},
      {"s60", "gl57", "s60", "gr57"},
      {"s60", "gr57", "s60", "gr57"},
      {"s60", "gl57", "s60", "gl57"},
      {"s60", "gl57", "s60", "gr57", "s60"},
      {"s60", "gr57", "s60", "gl57", "s60"},
      {"s60", "xl15", "s60", "xr16", "s60", "xl20"},
      {"s60", "xr21", "s60", "xl26", "s60", "xl15"},
  };
  spec.failure_rule.kind = roadprio::FailureRule::Kind::RadiusBelow;
  spec.failure_rule.radius = 40.0;
  return spec;
}

/// Six geometrically identical copies of one sharp-curve road; one mid-id
/// copy is planted as failed. Only diverging telemetry can tell the copies
/// apart.
inline roadprio::SynthCampaignSpec twin_road_spec(std::uint64_t seed) {
  using roadprio::ShapeLabel;
  roadprio::SynthCampaignSpec spec;
  spec.name = "twins";
  spec.seed = seed;
  spec.duplicate_factor = 6;
  spec.initial_speed = 12.0;
  spec.instability_min = 0.2;
  spec.instability_max = 2.0;
  roadprio::TemplateSpec s;
  s.id = "s60";
  s.shape = ShapeLabel::Straight;
  s.length = 60.0;
  roadprio::TemplateSpec c;
  c.id = "xl20";
  c.shape = ShapeLabel::LeftCurve;
  c.radius = 20.0;
  c.arc_angle = 1.2;
  spec.templates = {s, c};
  spec.roads = {{"s60", "xl20", "s60"}};
  spec.failure_rule.kind = roadprio::FailureRule::Kind::ExplicitRoads;
  spec.failure_rule.road_ids = {"r00_3"};
  return spec;
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& prefix) {
    static std::atomic<unsigned> counter{0};
    path = std::filesystem::temp_directory_path() /
           (prefix + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace testsupport
