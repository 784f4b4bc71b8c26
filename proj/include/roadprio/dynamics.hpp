#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "roadprio/errors.hpp"
#include "roadprio/geometry.hpp"

namespace roadprio {

struct TelemetrySample {
  double t = 0.0;          // seconds
  double speed = 0.0;      // m/s
  double steering = 0.0;   // radians
  double cte = 0.0;        // meters, signed cross-track error
  double yaw_rate = 0.0;   // rad/s
  std::size_t nearest_point_index = 0;
};

struct TestOutcome {
  std::string test_id;
  bool failed = false;
  int oob_count = 0;
};

/// Four driving-difficulty indicators: speed variability, steering
/// variability, mean absolute cross-track error, yaw-rate variability.
struct DynamicProfile {
  double speed_var = 0.0;
  double steering_var = 0.0;
  double mean_abs_cte = 0.0;
  double yaw_var = 0.0;
  bool normalized = false;

  std::array<double, 4> indicators() const {
    return {speed_var, steering_var, mean_abs_cte, yaw_var};
  }
  void set_indicator(std::size_t i, double value) {
    switch (i) {
      case 0: speed_var = value; break;
      case 1: steering_var = value; break;
      case 2: mean_abs_cte = value; break;
      case 3: yaw_var = value; break;
      default: fail(errc::invalid_argument, "indicator index out of range");
    }
  }
};

inline double population_stddev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double lo = values[0];
  double hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return 0.0;  // constant input is exactly zero spread
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return std::sqrt(var);
}

/// Raw profile over a sample window (a section's samples or a whole test).
/// Uses the population standard deviation so two-sample traces are well
/// defined.
inline DynamicProfile extract_profile(std::span<const TelemetrySample> samples) {
  if (samples.size() < 2) {
    fail(errc::insufficient_samples,
         "extract_profile requires at least 2 telemetry samples");
  }
  std::vector<double> speeds, steerings, yaws;
  speeds.reserve(samples.size());
  steerings.reserve(samples.size());
  yaws.reserve(samples.size());
  double abs_cte = 0.0;
  for (const TelemetrySample& s : samples) {
    speeds.push_back(s.speed);
    steerings.push_back(s.steering);
    yaws.push_back(s.yaw_rate);
    abs_cte += std::abs(s.cte);
  }
  DynamicProfile profile;
  profile.speed_var = population_stddev(speeds);
  profile.steering_var = population_stddev(steerings);
  profile.mean_abs_cte = abs_cte / static_cast<double>(samples.size());
  profile.yaw_var = population_stddev(yaws);
  profile.normalized = false;
  return profile;
}

/// Campaign-wide min-max scaling, indicator by indicator. A constant
/// indicator (min == max) maps to 0 everywhere.
inline std::vector<DynamicProfile> normalize_profiles(
    const std::vector<DynamicProfile>& profiles) {
  std::vector<DynamicProfile> out = profiles;
  if (out.empty()) return out;
  for (std::size_t i = 0; i < 4; ++i) {
    double lo = profiles.front().indicators()[i];
    double hi = lo;
    for (const DynamicProfile& p : profiles) {
      lo = std::min(lo, p.indicators()[i]);
      hi = std::max(hi, p.indicators()[i]);
    }
    const double span = hi - lo;
    for (DynamicProfile& p : out) {
      const double raw = p.indicators()[i];
      p.set_indicator(i, span > 0.0 ? (raw - lo) / span : 0.0);
    }
  }
  for (DynamicProfile& p : out) p.normalized = true;
  return out;
}

/// Mean absolute difference of the four normalized indicators; 0 means
/// identical dynamic behavior, 1 maximal dissimilarity.
inline double dynamic_distance(const DynamicProfile& p,
                               const DynamicProfile& q) {
  if (!p.normalized || !q.normalized) {
    fail(errc::not_normalized, "dynamic_distance requires normalized profiles");
  }
  const auto a = p.indicators();
  const auto b = q.indicators();
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) sum += std::abs(a[i] - b[i]);
  return sum / 4.0;
}

/// Samples belonging to a section: nearest_point_index within the section's
/// inclusive index range.
inline std::vector<TelemetrySample> samples_for_section(
    const Section& section, std::span<const TelemetrySample> road_samples) {
  std::vector<TelemetrySample> out;
  for (const TelemetrySample& s : road_samples) {
    if (s.nearest_point_index >= section.start_index &&
        s.nearest_point_index <= section.end_index) {
      out.push_back(s);
    }
  }
  return out;
}

/// Raw section profile. A section with fewer than two mapped samples (the
/// test may have aborted before reaching it) gets a zero profile and a
/// warning instead of an error.
inline DynamicProfile section_profile(const Section& section,
                                      std::span<const TelemetrySample> road_samples,
                                      std::vector<std::string>* warnings = nullptr) {
  const std::vector<TelemetrySample> samples =
      samples_for_section(section, road_samples);
  if (samples.size() < 2) {
    if (warnings != nullptr) {
      warnings->push_back("section '" + section.id +
                          "' has no usable telemetry; using a zero profile");
    }
    return DynamicProfile{};
  }
  return extract_profile(samples);
}

}  // namespace roadprio
