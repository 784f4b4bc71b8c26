#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "roadprio/dynamics.hpp"
#include "roadprio/errors.hpp"
#include "roadprio/geometry.hpp"
#include "roadprio/similarity.hpp"

namespace roadprio {

enum class CutRule { MeanPairwise, MeanPlusHalfStd, FixedThreshold };

inline const char* cut_rule_name(CutRule rule) {
  switch (rule) {
    case CutRule::MeanPairwise: return "mean_pairwise";
    case CutRule::MeanPlusHalfStd: return "mean_plus_half_std";
    case CutRule::FixedThreshold: return "fixed";
  }
  return "unknown";
}

inline CutRule cut_rule_from_name(const std::string& name) {
  if (name == "mean_pairwise") return CutRule::MeanPairwise;
  if (name == "mean_plus_half_std") return CutRule::MeanPlusHalfStd;
  if (name == "fixed") return CutRule::FixedThreshold;
  fail(errc::parse_error, "unknown cut rule '" + name + "'");
}

struct ClusteringParams {
  double w_dyn = 0.5;
  CutRule cut_rule = CutRule::MeanPairwise;
  double cut_threshold = 0.0;  // only used with CutRule::FixedThreshold
  static constexpr std::size_t kMaxRepresentatives = 3;

  void validate() const {
    if (!(w_dyn >= 0.0 && w_dyn <= 1.0)) {
      fail(errc::invalid_argument, "w_dyn must be in [0, 1]");
    }
  }
};

struct DistanceMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;  // row-major, size() == ids.size()^2

  std::size_t size() const { return ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values[i * ids.size() + j] = v;
    values[j * ids.size() + i] = v;
  }
};

struct Cluster {
  std::string id;
  ShapeLabel shape = ShapeLabel::Straight;
  std::vector<std::string> member_section_ids;
  std::vector<std::string> representative_ids;
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  ClusteringParams params_used;
};

/// Hybrid distance: (1 - w_dyn) * d_geom + w_dyn * d_dyn. Straight pairs
/// have no distinctive shape, so their geometric term is defined as 0 and
/// the distance is carried by dynamics alone.
inline double hybrid_distance(const Section& p, const DynamicProfile& dp,
                              const Section& q, const DynamicProfile& dq,
                              const ClusteringParams& params,
                              const SimilarityParams& simparams) {
  params.validate();
  if (p.shape != q.shape) {
    fail(errc::shape_mismatch, "hybrid_distance requires same-shape sections");
  }
  const double d_dyn = dynamic_distance(dp, dq);
  double d_geom = 0.0;
  if (p.shape != ShapeLabel::Straight) {
    d_geom = geometric_distance(p, q, simparams).value;
  }
  return (1.0 - params.w_dyn) * d_geom + params.w_dyn * d_dyn;
}

/// Merge cut computed from the off-diagonal entries of the input matrix.
inline double cut_threshold_for(const DistanceMatrix& matrix,
                                const ClusteringParams& params) {
  if (params.cut_rule == CutRule::FixedThreshold) return params.cut_threshold;
  const std::size_t n = matrix.size();
  if (n < 2) return 0.0;
  std::vector<double> offdiag;
  offdiag.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      offdiag.push_back(matrix.at(i, j));
    }
  }
  double mean = 0.0;
  for (double v : offdiag) mean += v;
  mean /= static_cast<double>(offdiag.size());
  if (params.cut_rule == CutRule::MeanPairwise) return mean;
  return mean + 0.5 * population_stddev(offdiag);
}

namespace detail {

/// Cluster sort key during agglomeration: the smallest member section id.
/// Content-derived, so tie-breaking is invariant under input permutation.
struct WorkingCluster {
  std::vector<std::size_t> members;
  std::string key;
};

}  // namespace detail

/// Complete-linkage agglomerative clustering over one shape type. Merging
/// stops when the next merge distance would exceed the cut; ties on merge
/// distance break on the lexicographically smallest pair of cluster keys.
inline ClusterSet agglomerate(const DistanceMatrix& matrix, ShapeLabel shape,
                              const ClusteringParams& params) {
  params.validate();
  const std::size_t n = matrix.size();
  ClusterSet result;
  result.params_used = params;
  if (n == 0) return result;

  const double cut = cut_threshold_for(matrix, params);

  std::vector<detail::WorkingCluster> active;
  active.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    active.push_back({{i}, matrix.ids[i]});
  }
  // Complete-linkage distances between active clusters, updated with the
  // Lance-Williams max rule on every merge.
  std::vector<std::vector<double>> linkage(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) linkage[i][j] = matrix.at(i, j);
  }

  while (active.size() > 1) {
    std::size_t best_a = 0, best_b = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    std::pair<const std::string*, const std::string*> best_key{nullptr, nullptr};
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = linkage[a][b];
        const std::string& lo = std::min(active[a].key, active[b].key);
        const std::string& hi = std::max(active[a].key, active[b].key);
        bool better = d < best_dist;
        if (!better && d == best_dist) {
          better = lo < *best_key.first ||
                   (lo == *best_key.first && hi < *best_key.second);
        }
        if (better) {
          best_dist = d;
          best_a = a;
          best_b = b;
          best_key = {&lo, &hi};
        }
      }
    }
    if (best_dist > cut) break;

    detail::WorkingCluster merged;
    merged.members = active[best_a].members;
    merged.members.insert(merged.members.end(), active[best_b].members.begin(),
                          active[best_b].members.end());
    merged.key = std::min(active[best_a].key, active[best_b].key);
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (k == best_a || k == best_b) continue;
      linkage[best_a][k] = linkage[k][best_a] =
          std::max(linkage[best_a][k], linkage[best_b][k]);
    }
    active[best_a] = std::move(merged);
    active.erase(active.begin() + best_b);
    for (auto& row : linkage) row.erase(row.begin() + best_b);
    linkage.erase(linkage.begin() + best_b);
  }

  std::sort(active.begin(), active.end(),
            [](const detail::WorkingCluster& a, const detail::WorkingCluster& b) {
              return a.key < b.key;
            });
  for (std::size_t i = 0; i < active.size(); ++i) {
    Cluster cluster;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%03zu", i);
    cluster.id = std::string(shape_name(shape)) + buf;
    cluster.shape = shape;
    for (std::size_t member : active[i].members) {
      cluster.member_section_ids.push_back(matrix.ids[member]);
    }
    std::sort(cluster.member_section_ids.begin(),
              cluster.member_section_ids.end());
    result.clusters.push_back(std::move(cluster));
  }
  return result;
}

/// Representative selection. Three or fewer members: all of them. Larger
/// clusters: the low / median / high section along the diversity axis
/// (mean |kappa| for curved clusters, arc length for straight ones), with
/// the lower median on even counts.
inline Cluster select_representatives(
    Cluster cluster,
    const std::unordered_map<std::string, const Section*>& sections) {
  if (cluster.member_section_ids.empty()) {
    fail(errc::invalid_argument, "cannot pick representatives of an empty cluster");
  }
  cluster.representative_ids.clear();
  if (cluster.member_section_ids.size() <= ClusteringParams::kMaxRepresentatives) {
    cluster.representative_ids = cluster.member_section_ids;
    std::sort(cluster.representative_ids.begin(),
              cluster.representative_ids.end());
    return cluster;
  }
  std::vector<std::pair<double, std::string>> keyed;
  keyed.reserve(cluster.member_section_ids.size());
  for (const std::string& id : cluster.member_section_ids) {
    auto it = sections.find(id);
    if (it == sections.end()) {
      fail(errc::invalid_argument, "unknown section id '" + id + "'");
    }
    const Section& section = *it->second;
    const double key = cluster.shape == ShapeLabel::Straight
                           ? section.arc_length
                           : section.mean_abs_curvature();
    keyed.emplace_back(key, id);
  }
  std::sort(keyed.begin(), keyed.end());
  const std::size_t k = keyed.size();
  cluster.representative_ids.push_back(keyed[0].second);
  cluster.representative_ids.push_back(keyed[(k - 1) / 2].second);
  cluster.representative_ids.push_back(keyed[k - 1].second);
  return cluster;
}

/// Pairwise hybrid distance matrix over same-shape sections. Entries are
/// independent, so rows can be filled from several threads with identical
/// results for any thread count.
inline DistanceMatrix build_distance_matrix(
    const std::vector<const Section*>& sections,
    const std::unordered_map<std::string, DynamicProfile>& profiles,
    const ClusteringParams& params, const SimilarityParams& simparams,
    int threads = 1) {
  DistanceMatrix matrix;
  matrix.ids.reserve(sections.size());
  for (const Section* section : sections) matrix.ids.push_back(section->id);
  matrix.values.assign(sections.size() * sections.size(), 0.0);

  auto profile_of = [&](const Section& section) -> const DynamicProfile& {
    auto it = profiles.find(section.id);
    if (it == profiles.end()) {
      fail(errc::invalid_argument,
           "no dynamic profile for section '" + section.id + "'");
    }
    return it->second;
  };

  auto fill_rows = [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) {
      for (std::size_t j = i + 1; j < sections.size(); ++j) {
        const double d =
            hybrid_distance(*sections[i], profile_of(*sections[i]),
                            *sections[j], profile_of(*sections[j]), params,
                            simparams);
        matrix.set(i, j, d);
      }
    }
  };

  const std::size_t n = sections.size();
  if (threads <= 1 || n < 4) {
    fill_rows(0, n);
    return matrix;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fill_rows(i, i + 1);
    });
  }
  for (auto& t : pool) t.join();
  return matrix;
}

/// Full clustering stage: group sections by shape, build per-shape hybrid
/// distance matrices, agglomerate, and pick representatives. The returned
/// ClusterSet is canonically ordered (shape, then smallest member id).
inline ClusterSet cluster_sections(
    const std::vector<Section>& sections,
    const std::unordered_map<std::string, DynamicProfile>& profiles,
    const ClusteringParams& params, const SimilarityParams& simparams,
    int threads = 1,
    std::vector<std::pair<ShapeLabel, DistanceMatrix>>* matrices_out = nullptr) {
  params.validate();
  simparams.validate();

  std::unordered_map<std::string, const Section*> lookup;
  lookup.reserve(sections.size());
  for (const Section& section : sections) lookup[section.id] = &section;

  ClusterSet combined;
  combined.params_used = params;
  for (ShapeLabel shape :
       {ShapeLabel::Straight, ShapeLabel::LeftCurve, ShapeLabel::RightCurve}) {
    std::vector<const Section*> group;
    for (const Section& section : sections) {
      if (section.shape == shape) group.push_back(&section);
    }
    if (group.empty()) continue;
    // Canonical input order so matrix ids are stable under input shuffles.
    std::sort(group.begin(), group.end(),
              [](const Section* a, const Section* b) { return a->id < b->id; });
    DistanceMatrix matrix =
        build_distance_matrix(group, profiles, params, simparams, threads);
    ClusterSet shape_set = agglomerate(matrix, shape, params);
    for (Cluster& cluster : shape_set.clusters) {
      combined.clusters.push_back(
          select_representatives(std::move(cluster), lookup));
    }
    if (matrices_out != nullptr) {
      matrices_out->emplace_back(shape, std::move(matrix));
    }
  }
  return combined;
}

}  // namespace roadprio
