#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "roadprio/errors.hpp"

namespace roadprio {

// Consecutive road points closer than this are considered duplicates.
inline constexpr double kMinPointSeparation = 1e-9;
// |det| below this means the three points are treated as collinear.
inline constexpr double kCollinearEps = 1e-12;

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2D& a, const Point2D& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

struct ScenarioConfig {
  Point2D initial_position{};
  double initial_speed = 0.0;
  std::map<std::string, std::string> extra;
};

/// One test case: an ordered centerline plus the scenario configuration.
struct Road {
  std::string id;
  std::vector<Point2D> points;
  ScenarioConfig config;
};

inline void validate_road(const Road& road) {
  if (road.points.size() < 3) {
    fail(errc::road_too_short,
         "road '" + road.id + "' has fewer than 3 points");
  }
  for (const auto& p : road.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      fail(errc::invalid_argument,
           "road '" + road.id + "' contains non-finite coordinates");
    }
  }
  if (road.config.initial_speed < 0.0) {
    fail(errc::invalid_argument,
         "road '" + road.id + "' has negative initial speed");
  }
  for (std::size_t i = 1; i < road.points.size(); ++i) {
    if (distance(road.points[i - 1], road.points[i]) <= kMinPointSeparation) {
      fail(errc::degenerate_geometry,
           "road '" + road.id + "' has duplicate consecutive points at index " +
               std::to_string(i));
    }
  }
}

inline double road_arc_length(const Road& road) {
  double total = 0.0;
  for (std::size_t i = 1; i < road.points.size(); ++i) {
    total += distance(road.points[i - 1], road.points[i]);
  }
  return total;
}

/// Signed curvature per interior road point. Positive values are left
/// (counterclockwise) turns, negative values right turns.
struct CurvatureProfile {
  std::vector<double> values;
};

enum class ShapeLabel { Straight = 0, LeftCurve = 1, RightCurve = 2 };

inline const char* shape_name(ShapeLabel shape) {
  switch (shape) {
    case ShapeLabel::Straight: return "straight";
    case ShapeLabel::LeftCurve: return "left_curve";
    case ShapeLabel::RightCurve: return "right_curve";
  }
  return "unknown";
}

inline ShapeLabel shape_from_name(const std::string& name) {
  if (name == "straight") return ShapeLabel::Straight;
  if (name == "left_curve") return ShapeLabel::LeftCurve;
  if (name == "right_curve") return ShapeLabel::RightCurve;
  fail(errc::parse_error, "unknown shape label '" + name + "'");
}

/// Maximal homogeneous-shape slice of a road. start_index/end_index are
/// inclusive point indices into the parent road; adjacent sections share
/// their boundary point so arc lengths add up to the road length.
struct Section {
  std::string id;
  std::string road_id;
  ShapeLabel shape = ShapeLabel::Straight;
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  std::vector<double> curvature_seq;
  double arc_length = 0.0;

  double mean_abs_curvature() const {
    if (curvature_seq.empty()) return 0.0;
    double sum = 0.0;
    for (double k : curvature_seq) sum += std::abs(k);
    return sum / static_cast<double>(curvature_seq.size());
  }
};

struct SegmentationParams {
  double tau_c = 0.015;      // 1/m, curvature threshold for "significant" curves
  std::size_t window_w = 3;  // hysteresis window, points
  double min_length = 10.0;  // meters, minimum section length

  void validate() const {
    if (!(tau_c > 0.0)) fail(errc::invalid_argument, "tau_c must be > 0");
    if (window_w < 1) fail(errc::invalid_argument, "window_w must be >= 1");
    if (!(min_length > 0.0)) {
      fail(errc::invalid_argument, "min_length must be > 0");
    }
  }
};

/// Three-point circumcircle curvature at every interior point. kappa_i is
/// sign(det)/Rad with Rad the circumradius of (p_{i-1}, p_i, p_{i+1}), and
/// exactly 0 when the points are collinear (|det| < kCollinearEps).
inline CurvatureProfile compute_curvature(const Road& road) {
  validate_road(road);
  const auto& pts = road.points;
  CurvatureProfile profile;
  profile.values.reserve(pts.size() - 2);
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Point2D& a = pts[i - 1];
    const Point2D& b = pts[i];
    const Point2D& c = pts[i + 1];
    const double det =
        (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    if (std::abs(det) < kCollinearEps) {
      profile.values.push_back(0.0);
      continue;
    }
    const double rad =
        (distance(b, c) * distance(a, c) * distance(a, b)) /
        (2.0 * std::abs(det));
    profile.values.push_back((det > 0.0 ? 1.0 : -1.0) / rad);
  }
  return profile;
}

/// Hysteresis shape classification. The label at position i is decided by
/// the window of window_w curvature values starting at i (truncated at the
/// end of the profile); indecisive windows retain the previous label. An
/// indecisive first window falls back to a plain threshold on the first
/// value.
inline std::vector<ShapeLabel> classify_points(const CurvatureProfile& profile,
                                               const SegmentationParams& params) {
  params.validate();
  const auto& k = profile.values;
  std::vector<ShapeLabel> labels(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const std::size_t end = std::min(i + params.window_w, k.size());
    bool all_straight = true;
    bool all_left = true;
    bool all_right = true;
    for (std::size_t j = i; j < end; ++j) {
      if (!(std::abs(k[j]) < params.tau_c)) all_straight = false;
      if (!(k[j] > params.tau_c)) all_left = false;
      if (!(k[j] < -params.tau_c)) all_right = false;
    }
    if (all_straight) {
      labels[i] = ShapeLabel::Straight;
    } else if (all_left) {
      labels[i] = ShapeLabel::LeftCurve;
    } else if (all_right) {
      labels[i] = ShapeLabel::RightCurve;
    } else if (i > 0) {
      labels[i] = labels[i - 1];
    } else if (k[0] > params.tau_c) {
      labels[i] = ShapeLabel::LeftCurve;
    } else if (k[0] < -params.tau_c) {
      labels[i] = ShapeLabel::RightCurve;
    } else {
      labels[i] = ShapeLabel::Straight;
    }
  }
  return labels;
}

namespace detail {

inline double arc_between(const Road& road, std::size_t first,
                          std::size_t last) {
  double total = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    total += distance(road.points[i], road.points[i + 1]);
  }
  return total;
}

inline std::string section_id(const std::string& road_id, std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "#%02zu", ordinal);
  return road_id + buf;
}

}  // namespace detail

/// Segments a road into maximal homogeneous-shape sections. Sections below
/// min_length are merged into their predecessor (a short leading section
/// merges forward instead); the absorbing section keeps its shape.
inline std::vector<Section> segment_road(const Road& road,
                                         const SegmentationParams& params) {
  params.validate();
  const CurvatureProfile profile = compute_curvature(road);
  if (road_arc_length(road) < params.min_length) {
    fail(errc::road_too_short,
         "road '" + road.id + "' is shorter than the minimum section length");
  }
  const std::vector<ShapeLabel> labels = classify_points(profile, params);
  const std::size_t n = road.points.size();

  // Maximal runs of identical labels. Label j describes road point j+1.
  struct Piece {
    ShapeLabel shape;
    std::size_t start;  // point index, inclusive
    std::size_t end;    // point index, inclusive
    std::vector<double> curvature;
  };
  std::vector<Piece> pieces;
  std::size_t run_start = 0;
  for (std::size_t j = 1; j <= labels.size(); ++j) {
    if (j == labels.size() || labels[j] != labels[run_start]) {
      Piece piece;
      piece.shape = labels[run_start];
      piece.start = run_start + 1;
      piece.end = j;  // point index of the last label in the run
      piece.curvature.assign(profile.values.begin() + run_start,
                             profile.values.begin() + j);
      pieces.push_back(std::move(piece));
      run_start = j;
    }
  }
  // Extend to cover the endpoints and chain adjacent pieces on a shared
  // boundary point (the first labelled point of the next run).
  pieces.front().start = 0;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    pieces[i].end = pieces[i + 1].start;
  }
  pieces.back().end = n - 1;

  auto piece_arc = [&](const Piece& piece) {
    return detail::arc_between(road, piece.start, piece.end);
  };

  // Merge short pieces until every piece respects min_length.
  while (pieces.size() > 1) {
    std::size_t short_idx = pieces.size();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (piece_arc(pieces[i]) < params.min_length) {
        short_idx = i;
        break;
      }
    }
    if (short_idx == pieces.size()) break;
    const std::size_t absorber = short_idx == 0 ? 1 : short_idx - 1;
    Piece merged;
    const Piece& lhs = pieces[std::min(short_idx, absorber)];
    const Piece& rhs = pieces[std::max(short_idx, absorber)];
    merged.shape = pieces[absorber].shape;
    merged.start = lhs.start;
    merged.end = rhs.end;
    merged.curvature = lhs.curvature;
    merged.curvature.insert(merged.curvature.end(), rhs.curvature.begin(),
                            rhs.curvature.end());
    pieces[std::min(short_idx, absorber)] = std::move(merged);
    pieces.erase(pieces.begin() + std::max(short_idx, absorber));
  }

  std::vector<Section> sections;
  sections.reserve(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Section section;
    section.id = detail::section_id(road.id, i);
    section.road_id = road.id;
    section.shape = pieces[i].shape;
    section.start_index = pieces[i].start;
    section.end_index = pieces[i].end;
    section.curvature_seq = std::move(pieces[i].curvature);
    section.arc_length =
        detail::arc_between(road, section.start_index, section.end_index);
    sections.push_back(std::move(section));
  }
  return sections;
}

}  // namespace roadprio
