// Acceptance suite: one pass/fail line per criterion, non-zero exit if any
// criterion fails. Criteria are property-based plus constructed-fixture
// experiments with ground truth known by construction; every tolerance is
// pinned here in code.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "roadprio/io.hpp"
#include "roadprio/pipeline.hpp"
#include "support.hpp"

using namespace roadprio;
using testsupport::brute_apfd;
using testsupport::brute_complete_linkage;
using testsupport::brute_dtw_normalized;
using testsupport::brute_mean_offdiag;
using testsupport::make_circle_road;
using testsupport::make_section;
using testsupport::random_matrix;
using testsupport::standard_campaign_spec;
using testsupport::twin_road_spec;

namespace {

struct Failure {
  std::string message;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure{message};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --------------------------------------------------------------------------
// 1. Curvature exactness on random circles, signs flip under mirroring.
// --------------------------------------------------------------------------
void criterion_curvature() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 eng(101);
  std::uniform_real_distribution<double> radius_dist(5.0, 500.0);
  std::uniform_real_distribution<double> span_dist(0.3, 2.0);
  std::uniform_real_distribution<double> center_dist(-300.0, 300.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double radius = radius_dist(eng);
    const bool ccw = (eng() & 1) != 0;
    const Road road = make_circle_road(
        "c" + std::to_string(trial), radius, 16 + trial % 32, span_dist(eng),
        ccw, span_dist(eng), center_dist(eng), center_dist(eng));
    Road mirrored = road;
    for (Point2D& p : mirrored.points) p.y = -p.y;
    const auto profile = compute_curvature(road);
    const auto flipped = compute_curvature(mirrored);
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
      const double k = profile.values[i];
      require(std::abs(std::abs(k) - 1.0 / radius) < 1e-9 / radius,
              "relative curvature error above 1e-9 at R=" + fmt(radius));
      require((k > 0.0) == ccw, "curvature sign does not match orientation");
      require(flipped.values[i] == -k, "mirroring did not flip the sign");
    }
  }
  require(seconds_since(start) < 1.0, "criterion 1 exceeded 1 s");
}

// --------------------------------------------------------------------------
// 2. Segmentation partition suite over seeded synthetic roads with known
//    template joints.
// --------------------------------------------------------------------------
struct BuiltRoad {
  Road road;
  std::vector<std::size_t> joints;  // point index of every template joint
};

BuiltRoad build_alternating_road(std::mt19937_64& eng, int ordinal) {
  std::uniform_int_distribution<int> template_count(2, 5);
  std::uniform_real_distribution<double> spacing_dist(1.0, 2.0);
  std::uniform_real_distribution<double> straight_dist(20.0, 80.0);
  std::uniform_real_distribution<double> radius_dist(20.0, 60.0);
  std::uniform_real_distribution<double> arc_dist(20.0, 70.0);

  BuiltRoad built;
  built.road.id = "road" + std::to_string(ordinal);
  Point2D pos{0.0, 0.0};
  double heading = 0.0;
  built.road.points.push_back(pos);
  int previous = -1;
  const int count = template_count(eng);
  for (int t = 0; t < count; ++t) {
    int shape = static_cast<int>(eng() % 3);
    while (shape == previous) shape = static_cast<int>(eng() % 3);
    previous = shape;
    const double spacing = spacing_dist(eng);
    if (shape == 0) {
      const double length = straight_dist(eng);
      const auto steps = static_cast<std::size_t>(
          std::max(1.0, std::round(length / spacing)));
      const double step = length / static_cast<double>(steps);
      for (std::size_t i = 0; i < steps; ++i) {
        pos.x += step * std::cos(heading);
        pos.y += step * std::sin(heading);
        built.road.points.push_back(pos);
      }
    } else {
      const double sign = shape == 1 ? 1.0 : -1.0;
      const double radius = radius_dist(eng);
      const double arc_len = arc_dist(eng);
      const double angle = arc_len / radius;
      const Point2D center{pos.x - sign * radius * std::sin(heading),
                           pos.y + sign * radius * std::cos(heading)};
      const auto steps = static_cast<std::size_t>(
          std::max(2.0, std::round(arc_len / spacing)));
      const double dphi = angle / static_cast<double>(steps);
      const double a0 = std::atan2(pos.y - center.y, pos.x - center.x);
      for (std::size_t i = 1; i <= steps; ++i) {
        const double a = a0 + sign * dphi * static_cast<double>(i);
        pos = {center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
        built.road.points.push_back(pos);
      }
      heading += sign * angle;
    }
    if (t + 1 < count) built.joints.push_back(built.road.points.size() - 1);
  }
  return built;
}

void criterion_segmentation() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 eng(202);
  SegmentationParams params;
  for (int trial = 0; trial < 500; ++trial) {
    const BuiltRoad built = build_alternating_road(eng, trial);
    const auto sections = segment_road(built.road, params);
    require(!sections.empty(), "no sections emitted");
    require(sections.front().start_index == 0, "first section must start at 0");
    require(sections.back().end_index == built.road.points.size() - 1,
            "last section must end at the last point");
    double arc_sum = 0.0;
    for (std::size_t i = 0; i < sections.size(); ++i) {
      require(sections[i].end_index > sections[i].start_index,
              "empty section range");
      require(sections[i].arc_length >= params.min_length,
              "section below min_length survived merging");
      if (i > 0) {
        require(sections[i].start_index == sections[i - 1].end_index,
                "sections do not chain");
      }
      arc_sum += sections[i].arc_length;
    }
    require(std::abs(arc_sum - road_arc_length(built.road)) <
                1e-6 * road_arc_length(built.road),
            "section arc lengths do not cover the road");
    for (std::size_t i = 0; i + 1 < sections.size(); ++i) {
      const auto boundary = static_cast<long long>(sections[i].end_index);
      long long best = std::numeric_limits<long long>::max();
      for (std::size_t joint : built.joints) {
        best = std::min(best,
                        std::llabs(boundary - static_cast<long long>(joint)));
      }
      require(best <= static_cast<long long>(params.window_w),
              "section boundary further than w points from every joint");
    }
  }
  require(seconds_since(start) < 10.0, "criterion 2 exceeded 10 s");
}

// --------------------------------------------------------------------------
// 3. DTW oracle equivalence plus identity and symmetry.
// --------------------------------------------------------------------------
void criterion_dtw() {
  std::mt19937_64 eng(303);
  std::uniform_real_distribution<double> value_dist(-0.08, 0.08);
  SimilarityParams params;
  auto random_seq = [&](std::size_t max_len) {
    std::vector<double> seq(1 + eng() % max_len);
    for (double& v : seq) v = value_dist(eng);
    return seq;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_seq(6);
    const auto b = random_seq(6);
    const double got = dtw_normalized(a, b, params);
    const double expected = brute_dtw_normalized(a, b, params.kappa_span);
    require(std::abs(got - expected) < 1e-12,
            "dtw diverges from path enumeration by " +
                fmt(std::abs(got - expected)));
  }
  for (int trial = 0; trial < 10000; ++trial) {
    const auto a = random_seq(10);
    const auto b = random_seq(10);
    require(dtw_normalized(a, a, params) == 0.0, "dtw identity violated");
    require(dtw_normalized(a, b, params) == dtw_normalized(b, a, params),
            "dtw symmetry violated");
  }
}

// --------------------------------------------------------------------------
// 4. Inclusion property on constructed sub-slice pairs.
// --------------------------------------------------------------------------
void criterion_inclusion() {
  std::mt19937_64 eng(404);
  std::uniform_real_distribution<double> value_dist(0.016, 0.08);
  SimilarityParams params;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t parent_len = 20 + eng() % 30;
    const auto max_slice =
        static_cast<std::size_t>(params.tau_len * static_cast<double>(parent_len)) - 1;
    const std::size_t slice_len = 2 + eng() % (max_slice - 2);
    const std::size_t offset = eng() % (parent_len - slice_len + 1);
    std::vector<double> parent(parent_len);
    for (double& v : parent) v = value_dist(eng);
    const std::vector<double> slice(parent.begin() + offset,
                                    parent.begin() + offset + slice_len);
    const auto p = make_section("p", ShapeLabel::LeftCurve, slice);
    const auto q = make_section("q", ShapeLabel::LeftCurve, parent);
    require(length_ratio(p, q) < params.tau_len,
            "fixture must route through inclusion");
    const GeomDistance d = geometric_distance(p, q, params);
    require(d.mode == GeomMode::Inclusion, "expected inclusion mode");
    require(d.value == 0.0, "sub-slice distance must be exactly 0");

    const auto r = make_section("r", ShapeLabel::RightCurve, slice);
    const GeomDistance dm = geometric_distance(r, q, params);
    require(dm.mode == GeomMode::Incomparable && dm.value == 1.0,
            "cross-shape distance must be 1");
  }
}

// --------------------------------------------------------------------------
// 5. Clustering oracle equivalence and byte-identical determinism.
// --------------------------------------------------------------------------
void criterion_clustering() {
  std::mt19937_64 eng(505);
  for (int trial = 0; trial < 500; ++trial) {
    const DistanceMatrix m = random_matrix(eng, 1 + eng() % 6);
    const ClusterSet set =
        agglomerate(m, ShapeLabel::LeftCurve, ClusteringParams{});
    std::vector<std::vector<std::string>> got;
    for (const Cluster& c : set.clusters) got.push_back(c.member_section_ids);
    std::sort(got.begin(), got.end());
    require(got == brute_complete_linkage(m, brute_mean_offdiag(m)),
            "agglomerate diverges from the naive reimplementation");
  }

  std::uniform_real_distribution<double> curv_dist(0.016, 0.06);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Section> sections;
  std::unordered_map<std::string, DynamicProfile> profiles;
  for (int i = 0; i < 40; ++i) {
    const ShapeLabel shape = i % 4 == 0   ? ShapeLabel::Straight
                             : i % 2 == 0 ? ShapeLabel::LeftCurve
                                          : ShapeLabel::RightCurve;
    const double sign = shape == ShapeLabel::RightCurve ? -1.0 : 1.0;
    std::vector<double> seq(
        6 + i % 7, shape == ShapeLabel::Straight ? 0.0 : sign * curv_dist(eng));
    sections.push_back(make_section("s" + std::to_string(i), shape,
                                    std::move(seq), 15.0 + i,
                                    "r" + std::to_string(i / 4)));
    DynamicProfile p;
    p.speed_var = unit(eng);
    p.steering_var = unit(eng);
    p.mean_abs_cte = unit(eng);
    p.yaw_var = unit(eng);
    p.normalized = true;
    profiles[sections.back().id] = p;
  }
  SimilarityParams sim;
  sim.kappa_span = campaign_kappa_span(sections);
  const std::string base = clusterset_to_json(
      cluster_sections(sections, profiles, ClusteringParams{}, sim, 1));
  for (int threads : {2, 3, 7}) {
    require(clusterset_to_json(cluster_sections(
                sections, profiles, ClusteringParams{}, sim, threads)) == base,
            "thread count changed the cluster dump");
  }
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    std::vector<Section> shuffled = sections;
    std::shuffle(shuffled.begin(), shuffled.end(), eng);
    require(clusterset_to_json(cluster_sections(shuffled, profiles,
                                                ClusteringParams{}, sim, 1)) ==
                base,
            "input permutation changed the cluster dump");
  }
}

// --------------------------------------------------------------------------
// 6. APFD oracle, hand values, bounds.
// --------------------------------------------------------------------------
void criterion_apfd() {
  auto ids = [](std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("t" + std::to_string(i));
    return out;
  };
  require(std::abs(apfd(ids(10), {"t0", "t1", "t2", "t3"}) - 0.8) < 1e-15,
          "hand value 0.8 not reproduced");
  require(std::abs(apfd(ids(5), {"t4"}) - 0.1) < 1e-15,
          "hand value 0.1 not reproduced");
  require(std::abs(apfd(ids(5), {"t0"}) - 0.9) < 1e-15,
          "hand value 0.9 not reproduced");

  std::mt19937_64 eng(606);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + eng() % 20;
    auto order = ids(n);
    std::shuffle(order.begin(), order.end(), eng);
    const std::size_t m = 1 + eng() % n;
    std::set<std::string> failures;
    auto pool = order;
    std::shuffle(pool.begin(), pool.end(), eng);
    for (std::size_t i = 0; i < m; ++i) failures.insert(pool[i]);
    const double got = apfd(order, failures);
    require(std::abs(got - brute_apfd(order, failures)) < 1e-12,
            "apfd diverges from the brute-force definition");
    const double n_d = static_cast<double>(n);
    const double m_d = static_cast<double>(m);
    require(got >= 1.0 / (2.0 * n_d) - 1e-12, "apfd below the lower bound");
    require(got <= 1.0 - m_d * (m_d + 1.0) / (2.0 * n_d * m_d) +
                       1.0 / (2.0 * n_d) + 1e-12,
            "apfd above the upper bound");
  }
}

// --------------------------------------------------------------------------
// 7. Random-baseline calibration: seeded Monte Carlo vs the hypergeometric
//    expectation on 20 (n, m, k) triples.
// --------------------------------------------------------------------------
void criterion_random_baseline() {
  const std::vector<std::array<std::size_t, 3>> triples{
      {100, 10, 10},  {100, 10, 50},  {100, 1, 10},  {100, 99, 10},
      {60, 10, 10},   {60, 10, 30},   {60, 5, 6},    {973, 11, 147},
      {973, 11, 10},  {500, 25, 50},  {500, 25, 5},  {200, 40, 20},
      {200, 3, 66},   {50, 2, 25},    {50, 49, 7},   {30, 15, 15},
      {1000, 10, 10}, {1000, 10, 333}, {80, 8, 79},  {10, 3, 4}};
  std::uint64_t seed = 707;
  for (const auto& [n, m, k] : triples) {
    const RandomEfd rnd = efd_random(n, m, k, 10000, seed++);
    require(std::abs(rnd.monte_carlo_pct - rnd.expected_pct) <= 2.0,
            "MC estimate off by more than 2 points for n=" + std::to_string(n) +
                " m=" + std::to_string(m) + " k=" + std::to_string(k) + ": " +
                fmt(rnd.monte_carlo_pct) + " vs " + fmt(rnd.expected_pct));
  }
}

// --------------------------------------------------------------------------
// 8. End-to-end fixture experiment on the 60-road campaign.
// --------------------------------------------------------------------------
void criterion_end_to_end() {
  const auto start = std::chrono::steady_clock::now();
  const SynthCampaign campaign = generate_campaign(standard_campaign_spec());
  require(campaign.roads.size() == 60, "fixture must have 60 roads");
  const std::set<std::string> failures = campaign.failure_set();
  require(failures.size() == 10, "fixture must plant 10 failures");

  PipelineConfig config;  // defaults: w_dyn = 0.5, alpha = beta = 0.5
  const auto sections = segment_campaign(campaign.roads, config.segmentation);
  const auto clusters = run_cluster_stage(sections, campaign.telemetry, config);
  const auto selection = run_select_stage(sections, clusters.clusters,
                                          campaign.telemetry, {}, config);

  const std::vector<std::string> order = execution_order(selection.ranked);
  const std::set<std::string> covered(selection.split.covered.begin(),
                                      selection.split.covered.end());

  const double reduction = reduction_ratio(order.size(), covered.size());
  require(reduction >= 50.0, "reduction " + fmt(reduction) + "% below 50%");

  const double frr = failed_retention(covered, failures);
  require(frr >= 80.0, "failed-road retention " + fmt(frr) + "% below 80%");

  const double ranked_apfd = apfd(order, failures);
  std::vector<std::string> random_order;
  for (const Road& road : campaign.roads) random_order.push_back(road.id);
  std::mt19937_64 rng(0);
  roadprio::detail::seeded_shuffle(random_order, rng);
  const double random_apfd = apfd(random_order, failures);
  require(ranked_apfd >= random_apfd + 0.2,
          "APFD " + fmt(ranked_apfd) + " not 0.2 above the seed-0 random " +
              fmt(random_apfd));

  const double efd10 = efd_at_k(order, failures, 10);
  const double expected10 = efd_random(order.size(), failures.size(), 10, 0, 0)
                                .expected_pct;
  require(efd10 >= 5.0 * expected10,
          "EFD@10 " + fmt(efd10) + "% below 5x the random expectation " +
              fmt(expected10) + "%");
  require(seconds_since(start) < 30.0, "criterion 8 exceeded 30 s");
}

// --------------------------------------------------------------------------
// 9. Dynamic-data ablation: hybrid retention never trails geometry-only on
//    twin-road fixtures.
// --------------------------------------------------------------------------
void criterion_ablation() {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SynthCampaign campaign = generate_campaign(twin_road_spec(seed));
    const std::set<std::string> failures = campaign.failure_set();
    require(failures.size() == 1, "twin fixture must plant one failure");

    auto frr_for = [&](double w_dyn) {
      PipelineConfig config;
      config.clustering.w_dyn = w_dyn;
      const auto sections =
          segment_campaign(campaign.roads, config.segmentation);
      const auto clusters =
          run_cluster_stage(sections, campaign.telemetry, config);
      const auto selection = run_select_stage(sections, clusters.clusters,
                                              campaign.telemetry, {}, config);
      const std::set<std::string> covered(selection.split.covered.begin(),
                                          selection.split.covered.end());
      return failed_retention(covered, failures);
    };

    const double hybrid = frr_for(0.5);
    const double geometry_only = frr_for(0.0);
    require(hybrid >= geometry_only,
            "seed " + std::to_string(seed) + ": hybrid FRR " + fmt(hybrid) +
                "% trails geometry-only " + fmt(geometry_only) + "%");
  }
}

// --------------------------------------------------------------------------
// 10. Format check: the published reduction figure and the table header.
// --------------------------------------------------------------------------
void criterion_format() {
  require(std::llround(reduction_ratio(973, 147)) == 85,
          "reduction_ratio(973, 147) must round to 85%");

  EvaluationReport report;
  report.campaign = "fmt";
  report.total_tests = 973;
  report.failed_tests = 11;
  report.selected_count = 147;
  report.reduction_pct = reduction_ratio(973, 147);
  report.frr_pct = 45.0;
  report.apfd = 0.92;
  const std::string csv = report_to_table_csv(report);
  const std::string header = csv.substr(0, csv.find('\n'));
  require(header ==
              "campaign,total,failed,selected,reduction_pct,frr_pct,"
              "efd_rnd_pct,efd10_pct,efd10_rnd_pct,apfd",
          "table header changed");
  require(std::count(header.begin(), header.end(), ',') == 9,
          "table header must have exactly 10 columns");
  require(csv.find("fmt,973,11,147,85,") != std::string::npos,
          "table row must report the rounded 85% reduction");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "curvature exactness on random circles", criterion_curvature},
      {2, "segmentation partition suite", criterion_segmentation},
      {3, "DTW oracle, identity and symmetry", criterion_dtw},
      {4, "inclusion matching property", criterion_inclusion},
      {5, "clustering oracle and determinism", criterion_clustering},
      {6, "APFD oracle and bounds", criterion_apfd},
      {7, "random-baseline calibration", criterion_random_baseline},
      {8, "end-to-end fixture experiment", criterion_end_to_end},
      {9, "dynamic-data ablation", criterion_ablation},
      {10, "summary format check", criterion_format},
  };
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    try {
      criterion.run();
      std::printf("PASS  %2d  %s\n", criterion.id, criterion.name);
    } catch (const Failure& f) {
      ++failures;
      std::printf("FAIL  %2d  %s: %s\n", criterion.id, criterion.name,
                  f.message.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL  %2d  %s: unexpected error: %s\n", criterion.id,
                  criterion.name, e.what());
    }
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu acceptance criteria failed\n", failures,
                criteria.size());
    return 1;
  }
  std::printf("all %zu acceptance criteria passed\n", criteria.size());
  return 0;
}
