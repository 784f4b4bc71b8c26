#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "roadprio/clustering.hpp"
#include "roadprio/dynamics.hpp"
#include "roadprio/errors.hpp"
#include "roadprio/evaluation.hpp"
#include "roadprio/geometry.hpp"
#include "roadprio/io.hpp"
#include "roadprio/prioritization.hpp"
#include "roadprio/selection.hpp"
#include "roadprio/similarity.hpp"

namespace roadprio {

using TelemetryMap = std::map<std::string, std::vector<TelemetrySample>>;

/// Segments every road of a campaign; section ids are "<road_id>#<ordinal>".
inline std::vector<Section> segment_campaign(const std::vector<Road>& roads,
                                             const SegmentationParams& params) {
  std::unordered_set<std::string> seen;
  std::vector<Section> sections;
  for (const Road& road : roads) {
    if (!seen.insert(road.id).second) {
      fail(errc::invalid_argument, "duplicate test id '" + road.id + "'");
    }
    std::vector<Section> road_sections = segment_road(road, params);
    sections.insert(sections.end(),
                    std::make_move_iterator(road_sections.begin()),
                    std::make_move_iterator(road_sections.end()));
  }
  return sections;
}

/// Test ids in campaign order, recovered from the section stream.
inline std::vector<std::string> test_ids_from_sections(
    const std::vector<Section>& sections) {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const Section& section : sections) {
    if (seen.insert(section.road_id).second) ids.push_back(section.road_id);
  }
  return ids;
}

/// Normalized per-section dynamic profiles (campaign-wide min-max scaling).
inline std::unordered_map<std::string, DynamicProfile> section_profiles_normalized(
    const std::vector<Section>& sections, const TelemetryMap& telemetry,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<DynamicProfile> raw;
  raw.reserve(sections.size());
  for (const Section& section : sections) {
    auto it = telemetry.find(section.road_id);
    if (it == telemetry.end()) {
      if (warnings != nullptr) {
        warnings->push_back("no telemetry for test '" + section.road_id +
                            "'; sections get zero profiles");
      }
      raw.push_back(DynamicProfile{});
      continue;
    }
    raw.push_back(section_profile(section, it->second, warnings));
  }
  const std::vector<DynamicProfile> normalized = normalize_profiles(raw);
  std::unordered_map<std::string, DynamicProfile> out;
  out.reserve(sections.size());
  for (std::size_t i = 0; i < sections.size(); ++i) {
    out[sections[i].id] = normalized[i];
  }
  return out;
}

/// Normalized whole-test dynamic profiles for the given test ids.
inline std::unordered_map<std::string, DynamicProfile> test_profiles_normalized(
    const std::vector<std::string>& test_ids, const TelemetryMap& telemetry,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<DynamicProfile> raw;
  raw.reserve(test_ids.size());
  for (const std::string& id : test_ids) {
    auto it = telemetry.find(id);
    if (it == telemetry.end() || it->second.size() < 2) {
      if (warnings != nullptr) {
        warnings->push_back("test '" + id +
                            "' has no usable telemetry; using a zero profile");
      }
      raw.push_back(DynamicProfile{});
      continue;
    }
    raw.push_back(extract_profile(it->second));
  }
  const std::vector<DynamicProfile> normalized = normalize_profiles(raw);
  std::unordered_map<std::string, DynamicProfile> out;
  out.reserve(test_ids.size());
  for (std::size_t i = 0; i < test_ids.size(); ++i) {
    out[test_ids[i]] = normalized[i];
  }
  return out;
}

struct ClusterStageResult {
  ClusterSet clusters;
  SimilarityParams similarity;
  std::vector<std::pair<ShapeLabel, DistanceMatrix>> matrices;
  std::vector<std::string> warnings;
};

/// Clustering stage: section profiles, per-shape hybrid matrices,
/// complete-linkage agglomeration, representative selection.
inline ClusterStageResult run_cluster_stage(const std::vector<Section>& sections,
                                            const TelemetryMap& telemetry,
                                            const PipelineConfig& config,
                                            bool keep_matrices = false) {
  if (sections.empty()) {
    fail(errc::invalid_argument, "no sections to cluster");
  }
  ClusterStageResult result;
  result.similarity = config.similarity_for(sections);
  const auto profiles =
      section_profiles_normalized(sections, telemetry, &result.warnings);
  result.clusters = cluster_sections(
      sections, profiles, config.clustering, result.similarity, config.threads,
      keep_matrices ? &result.matrices : nullptr);
  return result;
}

struct SelectStageResult {
  SuiteSplit split;
  RankedSuite ranked;
  std::unordered_map<std::string, TestScore> scores;
  std::vector<std::string> warnings;
};

/// Selection and prioritization stage: coverage requirements from cluster
/// representatives, suite split, multi-criteria scores, final ranking.
inline SelectStageResult run_select_stage(
    const std::vector<Section>& sections, const ClusterSet& clusters,
    const TelemetryMap& telemetry, const std::vector<TestOutcome>& history,
    const PipelineConfig& config) {
  SelectStageResult result;
  const std::vector<std::string> tests = test_ids_from_sections(sections);

  std::unordered_map<std::string, const Section*> lookup;
  lookup.reserve(sections.size());
  for (const Section& section : sections) lookup[section.id] = &section;

  const auto requirements = build_requirements(clusters, lookup);
  result.split = split_suite(tests, requirements);

  // Geometric scores, normalized across the campaign.
  std::map<std::string, std::vector<Section>> by_road;
  for (const Section& section : sections) {
    by_road[section.road_id].push_back(section);
  }
  std::vector<GeometricRaw> raws;
  raws.reserve(tests.size());
  for (const std::string& id : tests) {
    raws.push_back(geometric_score_raw(by_road.at(id), config.priority));
  }
  const std::vector<double> g = geometric_score(raws, config.priority);

  const auto test_profiles =
      test_profiles_normalized(tests, telemetry, &result.warnings);

  std::unordered_map<std::string, TestOutcome> history_by_id;
  for (const TestOutcome& outcome : history) {
    history_by_id[outcome.test_id] = outcome;
  }

  for (std::size_t i = 0; i < tests.size(); ++i) {
    const std::string& id = tests[i];
    std::optional<TestOutcome> outcome;
    auto it = history_by_id.find(id);
    if (it != history_by_id.end()) outcome = it->second;
    const double d = dynamic_score(test_profiles.at(id));
    const double h = historical_score(outcome, config.priority);
    result.scores[id] = make_test_score(id, g[i], d, h, config.priority);
  }
  result.ranked = rank(result.split, result.scores);
  return result;
}

/// Evaluation stage over a ranked order and its outcomes. Always reports
/// the configured k values plus k = |selected|.
inline EvaluationReport run_evaluate_stage(const std::string& campaign,
                                           const RankingData& ranking,
                                           const std::vector<TestOutcome>& outcomes,
                                           const PipelineConfig& config) {
  std::set<std::string> failures;
  for (const TestOutcome& o : outcomes) {
    if (o.failed) failures.insert(o.test_id);
  }
  std::set<std::size_t> ks(config.efd_ks.begin(), config.efd_ks.end());
  if (!ranking.covered.empty()) ks.insert(ranking.covered.size());
  return evaluate_ranking(campaign, ranking.order, ranking.covered, failures,
                          std::vector<std::size_t>(ks.begin(), ks.end()),
                          config.mc_trials, config.seed);
}

}  // namespace roadprio
