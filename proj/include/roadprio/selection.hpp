#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "roadprio/clustering.hpp"
#include "roadprio/errors.hpp"

namespace roadprio {

struct CoverageRequirement {
  std::string section_id;
  std::string cluster_id;
  std::string road_id;
};

struct SuiteSplit {
  std::vector<std::string> covered;            // T_cov, in first-satisfied order
  std::vector<std::string> surplus;            // T_surplus, in input order
  std::map<std::string, std::vector<std::string>> coverage_map;
};

/// One coverage requirement per cluster representative, carrying the parent
/// road id (each section belongs to exactly one road by construction).
inline std::vector<CoverageRequirement> build_requirements(
    const ClusterSet& clusters,
    const std::unordered_map<std::string, const Section*>& sections) {
  std::vector<CoverageRequirement> requirements;
  for (const Cluster& cluster : clusters.clusters) {
    for (const std::string& rep : cluster.representative_ids) {
      auto it = sections.find(rep);
      if (it == sections.end()) {
        fail(errc::invalid_argument,
             "representative section '" + rep + "' not found");
      }
      requirements.push_back({rep, cluster.id, it->second->road_id});
    }
  }
  return requirements;
}

/// Splits the suite: tests owning at least one requirement section form
/// T_cov (deduplicated, ordered by the first requirement they satisfy);
/// everything else is T_surplus.
inline SuiteSplit split_suite(const std::vector<std::string>& tests,
                              const std::vector<CoverageRequirement>& requirements) {
  std::unordered_set<std::string> known(tests.begin(), tests.end());
  SuiteSplit split;
  std::unordered_set<std::string> covered_set;
  for (const CoverageRequirement& req : requirements) {
    if (known.find(req.road_id) == known.end()) {
      fail(errc::orphan_requirement,
           "requirement on section '" + req.section_id +
               "' names road '" + req.road_id + "' with no matching test");
    }
    if (covered_set.insert(req.road_id).second) {
      split.covered.push_back(req.road_id);
    }
    split.coverage_map[req.road_id].push_back(req.section_id);
  }
  for (const std::string& test : tests) {
    if (covered_set.find(test) == covered_set.end()) {
      split.surplus.push_back(test);
    }
  }
  return split;
}

}  // namespace roadprio
