#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "roadprio/dynamics.hpp"
#include "roadprio/errors.hpp"
#include "roadprio/evaluation.hpp"
#include "roadprio/geometry.hpp"

namespace roadprio {

/// Building block of a synthetic road: a straight run or a circular arc.
struct TemplateSpec {
  std::string id;
  ShapeLabel shape = ShapeLabel::Straight;
  double radius = 0.0;     // meters, curves only
  double length = 0.0;     // meters, straights only
  double arc_angle = 0.0;  // radians, curves only
  double point_spacing = 2.0;

  double arc_length() const {
    return shape == ShapeLabel::Straight ? length : radius * arc_angle;
  }
};

struct ChannelNoise {
  double speed = 0.0;
  double steering = 0.0;
  double cte = 0.0;
  double yaw_rate = 0.0;
};

struct FailureRule {
  enum class Kind { None, RadiusBelow, ExplicitRoads };
  Kind kind = Kind::None;
  double radius = 0.0;               // RadiusBelow
  std::set<std::string> road_ids;    // ExplicitRoads, generated road ids
};

struct SynthCampaignSpec {
  std::string name = "synth";
  std::vector<TemplateSpec> templates;
  std::vector<std::vector<std::string>> roads;  // template-id sequences
  std::size_t duplicate_factor = 1;
  FailureRule failure_rule;
  ChannelNoise telemetry_noise;
  // Per-road driver instability factor range; scales the curvature-coupled
  // roughness so copies of the same geometry produce divergent dynamics.
  double instability_min = 1.0;
  double instability_max = 1.0;
  double initial_speed = 12.0;  // m/s
  std::uint64_t seed = 0;
};

struct SynthCampaign {
  std::string name;
  std::vector<Road> roads;
  std::map<std::string, std::vector<TelemetrySample>> telemetry;
  std::vector<TestOutcome> outcomes;

  std::set<std::string> failure_set() const {
    std::set<std::string> failures;
    for (const TestOutcome& o : outcomes) {
      if (o.failed) failures.insert(o.test_id);
    }
    return failures;
  }
};

namespace detail {

// Box-Muller; always consumes exactly two engine draws.
inline double gaussian(std::mt19937_64& eng) {
  const double u1 =
      std::max(static_cast<double>(eng() >> 11) * 0x1.0p-53, 1e-300);
  const double u2 = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
}

struct Cursor {
  Point2D pos{0.0, 0.0};
  double heading = 0.0;  // radians, 0 = +x
};

inline void append_template(const TemplateSpec& tmpl, Cursor& cursor,
                            std::vector<Point2D>& points) {
  if (tmpl.shape == ShapeLabel::Straight) {
    const std::size_t steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(tmpl.length / tmpl.point_spacing)));
    const double step = tmpl.length / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      cursor.pos.x += step * std::cos(cursor.heading);
      cursor.pos.y += step * std::sin(cursor.heading);
      points.push_back(cursor.pos);
    }
    return;
  }
  const double sign = tmpl.shape == ShapeLabel::LeftCurve ? 1.0 : -1.0;
  const Point2D center{cursor.pos.x - sign * tmpl.radius * std::sin(cursor.heading),
                       cursor.pos.y + sign * tmpl.radius * std::cos(cursor.heading)};
  const std::size_t steps = std::max<std::size_t>(
      2, static_cast<std::size_t>(
             std::llround(tmpl.radius * tmpl.arc_angle / tmpl.point_spacing)));
  const double dphi = tmpl.arc_angle / static_cast<double>(steps);
  const double a0 = std::atan2(cursor.pos.y - center.y, cursor.pos.x - center.x);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double a = a0 + sign * dphi * static_cast<double>(i);
    cursor.pos = {center.x + tmpl.radius * std::cos(a),
                  center.y + tmpl.radius * std::sin(a)};
    points.push_back(cursor.pos);
  }
  cursor.heading += sign * tmpl.arc_angle;
}

}  // namespace detail

inline void validate_spec(const SynthCampaignSpec& spec) {
  if (spec.templates.empty() || spec.roads.empty()) {
    fail(errc::invalid_spec, "campaign spec needs templates and roads");
  }
  std::set<std::string> ids;
  for (const TemplateSpec& tmpl : spec.templates) {
    if (tmpl.id.empty() || !ids.insert(tmpl.id).second) {
      fail(errc::invalid_spec, "template ids must be unique and non-empty");
    }
    if (!(tmpl.point_spacing > 0.0)) {
      fail(errc::invalid_spec, "template '" + tmpl.id + "' needs point_spacing > 0");
    }
    if (tmpl.shape == ShapeLabel::Straight) {
      if (!(tmpl.length > 0.0)) {
        fail(errc::invalid_spec, "straight template '" + tmpl.id + "' needs length > 0");
      }
    } else if (!(tmpl.radius > 0.0) || !(tmpl.arc_angle > 0.0)) {
      fail(errc::invalid_spec,
           "curve template '" + tmpl.id + "' needs radius > 0 and arc_angle > 0");
    }
    if (tmpl.arc_length() < 10.0) {
      fail(errc::invalid_spec,
           "template '" + tmpl.id + "' is shorter than the minimum section length");
    }
  }
  for (const auto& sequence : spec.roads) {
    if (sequence.empty()) fail(errc::invalid_spec, "empty template sequence");
    for (const std::string& id : sequence) {
      if (!ids.count(id)) {
        fail(errc::invalid_spec, "road references unknown template '" + id + "'");
      }
    }
  }
  if (spec.duplicate_factor < 1) {
    fail(errc::invalid_spec, "duplicate_factor must be >= 1");
  }
  if (!(spec.instability_min > 0.0) ||
      spec.instability_max < spec.instability_min) {
    fail(errc::invalid_spec, "instability range must satisfy 0 < min <= max");
  }
  if (!(spec.initial_speed > 0.0)) {
    fail(errc::invalid_spec, "initial_speed must be > 0");
  }
  const double* noises[] = {&spec.telemetry_noise.speed,
                            &spec.telemetry_noise.steering,
                            &spec.telemetry_noise.cte,
                            &spec.telemetry_noise.yaw_rate};
  for (const double* n : noises) {
    if (*n < 0.0) fail(errc::invalid_spec, "telemetry noise must be >= 0");
  }
}

/// Deterministic synthetic campaign: roads are tangent-continuous template
/// concatenations, telemetry couples to curvature (steering follows kappa,
/// cross-track and yaw roughness scale with |kappa| and a per-road
/// instability factor), and outcomes follow the failure rule exactly.
inline SynthCampaign generate_campaign(const SynthCampaignSpec& spec) {
  validate_spec(spec);
  std::unordered_map<std::string, const TemplateSpec*> templates;
  for (const TemplateSpec& tmpl : spec.templates) templates[tmpl.id] = &tmpl;

  constexpr double kWheelbase = 2.5;   // m
  constexpr double kSpeedRough = 30.0; // (m/s)/(1/m)
  constexpr double kSteerRough = 5.0;  // rad/(1/m)
  constexpr double kCteRough = 25.0;   // m/(1/m)
  constexpr double kYawRough = 4.0;    // (rad/s)/(1/m)

  SynthCampaign campaign;
  campaign.name = spec.name;
  std::size_t ordinal = 0;
  for (std::size_t base = 0; base < spec.roads.size(); ++base) {
    for (std::size_t copy = 0; copy < spec.duplicate_factor; ++copy, ++ordinal) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "r%02zu_%zu", base, copy);

      Road road;
      road.id = buf;
      detail::Cursor cursor;
      road.points.push_back(cursor.pos);
      bool has_sharp = false;
      std::string sequence_label;
      for (const std::string& tid : spec.roads[base]) {
        const TemplateSpec& tmpl = *templates.at(tid);
        detail::append_template(tmpl, cursor, road.points);
        if (tmpl.shape != ShapeLabel::Straight &&
            spec.failure_rule.kind == FailureRule::Kind::RadiusBelow &&
            tmpl.radius < spec.failure_rule.radius) {
          has_sharp = true;
        }
        if (!sequence_label.empty()) sequence_label += "|";
        sequence_label += tid;
      }
      road.config.initial_position = road.points.front();
      road.config.initial_speed = spec.initial_speed;
      road.config.extra["templates"] = sequence_label;

      bool failed = false;
      switch (spec.failure_rule.kind) {
        case FailureRule::Kind::None: break;
        case FailureRule::Kind::RadiusBelow: failed = has_sharp; break;
        case FailureRule::Kind::ExplicitRoads:
          failed = spec.failure_rule.road_ids.count(road.id) > 0;
          break;
      }

      // Telemetry: one sample per road point, clocked at the nominal speed.
      // The driver model reacts with a short lag: the curvature-coupled
      // response only engages once curvature has persisted for kReactLag
      // points, so samples on straight stretches stay exactly calm. Every
      // curve encounter draws its own instability factor u, which scales the
      // curvature-coupled roughness for that encounter.
      std::mt19937_64 eng(detail::mix_seed(spec.seed, ordinal));
      const CurvatureProfile profile = compute_curvature(road);
      std::vector<double> kappa_at(road.points.size(), 0.0);
      for (std::size_t j = 0; j < road.points.size(); ++j) {
        if (j >= 1 && j <= profile.values.size()) {
          kappa_at[j] = profile.values[j - 1];
        } else if (!profile.values.empty() && j > 0) {
          kappa_at[j] = profile.values.back();
        }
      }
      constexpr std::size_t kReactLag = 3;
      constexpr double kReactThreshold = 0.015;  // 1/m, significant curvature
      std::vector<TelemetrySample> samples;
      samples.reserve(road.points.size());
      double cumulative = 0.0;
      double u = spec.instability_min;
      bool was_engaged = false;
      for (std::size_t j = 0; j < road.points.size(); ++j) {
        if (j > 0) cumulative += distance(road.points[j - 1], road.points[j]);
        const double kappa = kappa_at[j];
        const double mag = std::abs(kappa);
        bool engaged = j + 1 >= kReactLag;
        for (std::size_t back = 0; engaged && back < kReactLag; ++back) {
          engaged = std::abs(kappa_at[j - back]) > kReactThreshold;
        }
        if (engaged && !was_engaged) {
          u = detail::uniform(eng, spec.instability_min, spec.instability_max);
        }
        was_engaged = engaged;
        const double gate = engaged ? 1.0 : 0.0;
        TelemetrySample s;
        s.t = cumulative / spec.initial_speed;
        s.nearest_point_index = j;
        s.speed = spec.initial_speed *
                      (1.0 - 0.5 * std::min(1.0, mag / 0.05) * gate) +
                  gate * mag * u * kSpeedRough * detail::gaussian(eng) +
                  spec.telemetry_noise.speed * detail::gaussian(eng);
        s.steering = gate * std::atan(kWheelbase * kappa) +
                     gate * mag * u * kSteerRough * detail::gaussian(eng) +
                     spec.telemetry_noise.steering * detail::gaussian(eng);
        s.cte = gate * mag * u * kCteRough * detail::gaussian(eng) +
                spec.telemetry_noise.cte * detail::gaussian(eng);
        s.yaw_rate = gate * s.speed * kappa +
                     gate * mag * u * kYawRough * detail::gaussian(eng) +
                     spec.telemetry_noise.yaw_rate * detail::gaussian(eng);
        samples.push_back(s);
      }

      campaign.telemetry[road.id] = std::move(samples);
      campaign.outcomes.push_back({road.id, failed, failed ? 1 : 0});
      campaign.roads.push_back(std::move(road));
    }
  }
  return campaign;
}

}  // namespace roadprio
