#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "roadprio/errors.hpp"
#include "roadprio/geometry.hpp"

namespace roadprio {

struct SimilarityParams {
  double tau_len = 0.8;     // length ratio threshold for direct DTW
  double kappa_span = 0.05; // 1/m, per-step DTW cost normalization span

  void validate() const {
    if (!(tau_len > 0.0 && tau_len <= 1.0)) {
      fail(errc::invalid_argument, "tau_len must be in (0, 1]");
    }
    if (!(kappa_span > 0.0)) {
      fail(errc::invalid_argument, "kappa_span must be > 0");
    }
  }
};

/// Default kappa_span: largest |kappa| over the campaign's curved sections,
/// floored at 0.05 so nearly straight campaigns do not blow the ratio up.
inline double campaign_kappa_span(const std::vector<Section>& sections,
                                  double floor_value = 0.05) {
  double max_abs = 0.0;
  for (const Section& section : sections) {
    if (section.shape == ShapeLabel::Straight) continue;
    for (double k : section.curvature_seq) {
      max_abs = std::max(max_abs, std::abs(k));
    }
  }
  return std::max(max_abs, floor_value);
}

enum class GeomMode { Direct, Inclusion, Incomparable };

inline const char* geom_mode_name(GeomMode mode) {
  switch (mode) {
    case GeomMode::Direct: return "direct";
    case GeomMode::Inclusion: return "inclusion";
    case GeomMode::Incomparable: return "incomparable";
  }
  return "unknown";
}

struct GeomDistance {
  double value = 1.0;
  GeomMode mode = GeomMode::Incomparable;
};

/// Length-normalized DTW over curvature sequences. Per-step cost is
/// |ka - kb| / kappa_span clamped to 1; the result is the minimal total
/// path cost divided by the warping path length, so it lies in [0, 1].
/// Among equal-cost paths the longest one defines the path length, which
/// keeps the value symmetric in the arguments.
inline double dtw_normalized(std::span<const double> a,
                             std::span<const double> b,
                             const SimilarityParams& params) {
  params.validate();
  if (a.empty() || b.empty()) {
    fail(errc::empty_sequence, "dtw_normalized requires non-empty sequences");
  }
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> cost(n * m, 0.0);
  std::vector<std::size_t> length(n * m, 0);
  auto idx = [m](std::size_t i, std::size_t j) { return i * m + j; };
  auto step_cost = [&](std::size_t i, std::size_t j) {
    const double c = std::abs(a[i] - b[j]) / params.kappa_span;
    return c > 1.0 ? 1.0 : c;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = step_cost(i, j);
      if (i == 0 && j == 0) {
        cost[idx(i, j)] = c;
        length[idx(i, j)] = 1;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      if (i > 0) best = std::min(best, cost[idx(i - 1, j)]);
      if (j > 0) best = std::min(best, cost[idx(i, j - 1)]);
      if (i > 0 && j > 0) best = std::min(best, cost[idx(i - 1, j - 1)]);
      std::size_t longest = 0;
      if (i > 0 && cost[idx(i - 1, j)] == best) {
        longest = std::max(longest, length[idx(i - 1, j)]);
      }
      if (j > 0 && cost[idx(i, j - 1)] == best) {
        longest = std::max(longest, length[idx(i, j - 1)]);
      }
      if (i > 0 && j > 0 && cost[idx(i - 1, j - 1)] == best) {
        longest = std::max(longest, length[idx(i - 1, j - 1)]);
      }
      cost[idx(i, j)] = best + c;
      length[idx(i, j)] = longest + 1;
    }
  }
  const double total = cost[idx(n - 1, m - 1)];
  if (total == 0.0) return 0.0;
  return total / static_cast<double>(length[idx(n - 1, m - 1)]);
}

inline double dtw_normalized(const std::vector<double>& a,
                             const std::vector<double>& b,
                             const SimilarityParams& params) {
  return dtw_normalized(std::span<const double>(a), std::span<const double>(b),
                        params);
}

/// min(|P|, |Q|) / max(|P|, |Q|) over curvature sequence lengths.
inline double length_ratio(const Section& p, const Section& q) {
  if (p.curvature_seq.empty() || q.curvature_seq.empty()) {
    fail(errc::empty_sequence, "length_ratio requires non-empty sections");
  }
  const double np = static_cast<double>(p.curvature_seq.size());
  const double nq = static_cast<double>(q.curvature_seq.size());
  return std::min(np, nq) / std::max(np, nq);
}

/// Sliding-window inclusion similarity: the shorter section P is aligned at
/// every offset 0..|Q|-|P| along Q and scored 1 - DTW against the window;
/// the best alignment wins.
inline double inclusion_similarity(const Section& p, const Section& q,
                                   const SimilarityParams& params) {
  if (p.shape != q.shape) {
    fail(errc::shape_mismatch, "inclusion_similarity requires equal shapes");
  }
  const auto& shorter = p.curvature_seq;
  const auto& longer = q.curvature_seq;
  if (shorter.empty() || longer.empty()) {
    fail(errc::empty_sequence, "inclusion_similarity requires non-empty sections");
  }
  if (shorter.size() > longer.size()) {
    fail(errc::invalid_argument,
         "inclusion_similarity expects the shorter section first");
  }
  double best = 0.0;
  for (std::size_t k = 0; k + shorter.size() <= longer.size(); ++k) {
    const double sim =
        1.0 - dtw_normalized(std::span<const double>(shorter),
                             std::span<const double>(longer).subspan(
                                 k, shorter.size()),
                             params);
    if (k == 0 || sim > best) best = sim;
  }
  return best;
}

/// Geometric distance between two sections. Cross-shape pairs and any pair
/// involving a straight section are incomparable (distance 1); similar
/// lengths go through DTW directly, dissimilar lengths through inclusion
/// matching with the shorter section slid along the longer one.
inline GeomDistance geometric_distance(const Section& p, const Section& q,
                                       const SimilarityParams& params) {
  if (p.shape != q.shape || p.shape == ShapeLabel::Straight ||
      q.shape == ShapeLabel::Straight) {
    return {1.0, GeomMode::Incomparable};
  }
  if (length_ratio(p, q) >= params.tau_len) {
    return {dtw_normalized(p.curvature_seq, q.curvature_seq, params),
            GeomMode::Direct};
  }
  const bool p_shorter = p.curvature_seq.size() <= q.curvature_seq.size();
  const Section& shorter = p_shorter ? p : q;
  const Section& longer = p_shorter ? q : p;
  return {1.0 - inclusion_similarity(shorter, longer, params),
          GeomMode::Inclusion};
}

}  // namespace roadprio
