#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "roadprio/clustering.hpp"
#include "roadprio/dynamics.hpp"
#include "roadprio/errors.hpp"
#include "roadprio/evaluation.hpp"
#include "roadprio/fixtures.hpp"
#include "roadprio/geometry.hpp"
#include "roadprio/prioritization.hpp"
#include "roadprio/selection.hpp"

namespace roadprio {

// ---------------------------------------------------------------------------
// Canonical formatting. All pipeline outputs are emitted by hand with sorted
// keys and a fixed 9-significant-digit float format so reruns are
// byte-identical.
// ---------------------------------------------------------------------------

inline std::string fmt_g9(double value) {
  if (value == 0.0) return "0";  // collapse -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

inline void json_escape_to(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::parse_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::invalid_argument, "cannot write '" + path + "'");
  out << content;
}

inline nlohmann::json parse_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json parsed = nlohmann::json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    fail(errc::parse_error, "malformed JSON in '" + path + "'");
  }
  return parsed;
}

// ---------------------------------------------------------------------------
// Roads file
// ---------------------------------------------------------------------------

struct CampaignInput {
  std::string name;
  std::vector<Road> roads;
};

inline CampaignInput roads_from_json(const nlohmann::json& j) {
  CampaignInput input;
  try {
    input.name = j.value("campaign", std::string("campaign"));
    if (!j.contains("tests") || !j.at("tests").is_array()) {
      fail(errc::parse_error, "roads file needs a top-level 'tests' array");
    }
    for (const auto& test : j.at("tests")) {
      Road road;
      road.id = test.at("id").get<std::string>();
      for (const auto& point : test.at("road").at("points")) {
        road.points.push_back(
            {point.at(0).get<double>(), point.at(1).get<double>()});
      }
      if (test.contains("config")) {
        const auto& config = test.at("config");
        if (config.contains("initial_position")) {
          road.config.initial_position = {
              config.at("initial_position").at(0).get<double>(),
              config.at("initial_position").at(1).get<double>()};
        }
        road.config.initial_speed = config.value("initial_speed", 0.0);
        if (config.contains("extra")) {
          for (const auto& [key, value] : config.at("extra").items()) {
            road.config.extra[key] = value.get<std::string>();
          }
        }
      }
      input.roads.push_back(std::move(road));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("invalid roads file: ") + e.what());
  }
  return input;
}

inline CampaignInput read_roads_file(const std::string& path) {
  return roads_from_json(parse_json_file(path));
}

inline std::string roads_to_json(const std::string& campaign,
                                 const std::vector<Road>& roads) {
  std::string out = "{\"campaign\":";
  json_escape_to(out, campaign);
  out += ",\"tests\":[";
  for (std::size_t i = 0; i < roads.size(); ++i) {
    const Road& road = roads[i];
    if (i > 0) out += ',';
    out += "{\"config\":{\"extra\":{";
    bool first = true;
    for (const auto& [key, value] : road.config.extra) {
      if (!first) out += ',';
      first = false;
      json_escape_to(out, key);
      out += ':';
      json_escape_to(out, value);
    }
    out += "},\"initial_position\":[";
    out += fmt_g9(road.config.initial_position.x);
    out += ',';
    out += fmt_g9(road.config.initial_position.y);
    out += "],\"initial_speed\":";
    out += fmt_g9(road.config.initial_speed);
    out += "},\"id\":";
    json_escape_to(out, road.id);
    out += ",\"road\":{\"points\":[";
    for (std::size_t p = 0; p < road.points.size(); ++p) {
      if (p > 0) out += ',';
      out += '[';
      out += fmt_g9(road.points[p].x);
      out += ',';
      out += fmt_g9(road.points[p].y);
      out += ']';
    }
    out += "]}}";
  }
  out += "]}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Telemetry / outcomes CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

inline double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(errc::parse_error, std::string("invalid ") + what + " value '" + s + "'");
  }
}

inline std::size_t parse_index(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    fail(errc::parse_error, std::string("invalid ") + what + " value '" + s + "'");
  }
}

}  // namespace detail

inline constexpr const char* kTelemetryHeader =
    "test_id,t,speed,steering,cte,yaw_rate,nearest_point_index";
inline constexpr const char* kOutcomesHeader = "test_id,failed,oob_count";
inline constexpr const char* kRankingHeader = "position,group,test_id,g,d,h,p";
inline constexpr const char* kTableRowHeader =
    "campaign,total,failed,selected,reduction_pct,frr_pct,efd_rnd_pct,"
    "efd10_pct,efd10_rnd_pct,apfd";

inline std::map<std::string, std::vector<TelemetrySample>> read_telemetry_csv(
    const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) ||
      detail::split_csv_line(line) != detail::split_csv_line(kTelemetryHeader)) {
    fail(errc::parse_error, "telemetry file '" + path + "' has a bad header");
  }
  std::map<std::string, std::vector<TelemetrySample>> telemetry;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 7) {
      fail(errc::parse_error, "telemetry row with wrong field count: " + line);
    }
    TelemetrySample s;
    s.t = detail::parse_double(fields[1], "t");
    s.speed = detail::parse_double(fields[2], "speed");
    s.steering = detail::parse_double(fields[3], "steering");
    s.cte = detail::parse_double(fields[4], "cte");
    s.yaw_rate = detail::parse_double(fields[5], "yaw_rate");
    s.nearest_point_index = detail::parse_index(fields[6], "nearest_point_index");
    auto& trace = telemetry[fields[0]];
    if (!trace.empty() && s.t < trace.back().t) {
      fail(errc::parse_error,
           "telemetry timestamps for test '" + fields[0] + "' decrease");
    }
    trace.push_back(s);
  }
  return telemetry;
}

inline std::string telemetry_to_csv(
    const std::map<std::string, std::vector<TelemetrySample>>& telemetry) {
  std::string out = kTelemetryHeader;
  out += '\n';
  for (const auto& [test_id, samples] : telemetry) {
    for (const TelemetrySample& s : samples) {
      out += test_id;
      out += ',';
      out += fmt_g9(s.t);
      out += ',';
      out += fmt_g9(s.speed);
      out += ',';
      out += fmt_g9(s.steering);
      out += ',';
      out += fmt_g9(s.cte);
      out += ',';
      out += fmt_g9(s.yaw_rate);
      out += ',';
      out += std::to_string(s.nearest_point_index);
      out += '\n';
    }
  }
  return out;
}

inline std::vector<TestOutcome> read_outcomes_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) ||
      detail::split_csv_line(line) != detail::split_csv_line(kOutcomesHeader)) {
    fail(errc::parse_error, "outcomes file '" + path + "' has a bad header");
  }
  std::vector<TestOutcome> outcomes;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 3) {
      fail(errc::parse_error, "outcomes row with wrong field count: " + line);
    }
    TestOutcome outcome;
    outcome.test_id = fields[0];
    if (fields[1] != "0" && fields[1] != "1") {
      fail(errc::parse_error, "outcomes 'failed' must be 0 or 1: " + line);
    }
    outcome.failed = fields[1] == "1";
    outcome.oob_count = static_cast<int>(detail::parse_index(fields[2], "oob_count"));
    if (outcome.failed != (outcome.oob_count > 0)) {
      fail(errc::parse_error,
           "outcomes row is inconsistent (failed vs oob_count): " + line);
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

inline std::string outcomes_to_csv(const std::vector<TestOutcome>& outcomes) {
  std::string out = kOutcomesHeader;
  out += '\n';
  for (const TestOutcome& o : outcomes) {
    out += o.test_id;
    out += ',';
    out += o.failed ? '1' : '0';
    out += ',';
    out += std::to_string(o.oob_count);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sections dump (JSON lines)
// ---------------------------------------------------------------------------

inline std::string section_to_json(const Section& section) {
  std::string out = "{\"arc_length\":";
  out += fmt_g9(section.arc_length);
  out += ",\"curvature_seq\":[";
  for (std::size_t i = 0; i < section.curvature_seq.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt_g9(section.curvature_seq[i]);
  }
  out += "],\"end_index\":";
  out += std::to_string(section.end_index);
  out += ",\"id\":";
  json_escape_to(out, section.id);
  out += ",\"road_id\":";
  json_escape_to(out, section.road_id);
  out += ",\"shape\":\"";
  out += shape_name(section.shape);
  out += "\",\"start_index\":";
  out += std::to_string(section.start_index);
  out += '}';
  return out;
}

inline std::string sections_to_jsonl(const std::vector<Section>& sections) {
  std::string out;
  for (const Section& section : sections) {
    out += section_to_json(section);
    out += '\n';
  }
  return out;
}

inline std::vector<Section> read_sections_jsonl(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<Section> sections;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      fail(errc::parse_error, "malformed section line: " + line);
    }
    try {
      Section section;
      section.id = j.at("id").get<std::string>();
      section.road_id = j.at("road_id").get<std::string>();
      section.shape = shape_from_name(j.at("shape").get<std::string>());
      section.start_index = j.at("start_index").get<std::size_t>();
      section.end_index = j.at("end_index").get<std::size_t>();
      section.arc_length = j.at("arc_length").get<double>();
      for (const auto& v : j.at("curvature_seq")) {
        section.curvature_seq.push_back(v.get<double>());
      }
      sections.push_back(std::move(section));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(errc::parse_error, std::string("invalid section line: ") + e.what());
    }
  }
  return sections;
}

// ---------------------------------------------------------------------------
// Cluster set dump
// ---------------------------------------------------------------------------

inline std::string clusterset_to_json(const ClusterSet& set) {
  std::string out = "{\"clusters\":[";
  for (std::size_t i = 0; i < set.clusters.size(); ++i) {
    const Cluster& cluster = set.clusters[i];
    if (i > 0) out += ',';
    out += "{\"id\":";
    json_escape_to(out, cluster.id);
    out += ",\"members\":[";
    for (std::size_t m = 0; m < cluster.member_section_ids.size(); ++m) {
      if (m > 0) out += ',';
      json_escape_to(out, cluster.member_section_ids[m]);
    }
    out += "],\"representatives\":[";
    for (std::size_t r = 0; r < cluster.representative_ids.size(); ++r) {
      if (r > 0) out += ',';
      json_escape_to(out, cluster.representative_ids[r]);
    }
    out += "],\"shape\":\"";
    out += shape_name(cluster.shape);
    out += "\"}";
  }
  out += "],\"params\":{\"cut_rule\":\"";
  out += cut_rule_name(set.params_used.cut_rule);
  out += "\",\"cut_threshold\":";
  out += fmt_g9(set.params_used.cut_threshold);
  out += ",\"w_dyn\":";
  out += fmt_g9(set.params_used.w_dyn);
  out += "}}\n";
  return out;
}

inline ClusterSet read_clusterset_json(const std::string& path) {
  const nlohmann::json j = parse_json_file(path);
  ClusterSet set;
  try {
    for (const auto& jc : j.at("clusters")) {
      Cluster cluster;
      cluster.id = jc.at("id").get<std::string>();
      cluster.shape = shape_from_name(jc.at("shape").get<std::string>());
      for (const auto& m : jc.at("members")) {
        cluster.member_section_ids.push_back(m.get<std::string>());
      }
      for (const auto& r : jc.at("representatives")) {
        cluster.representative_ids.push_back(r.get<std::string>());
      }
      set.clusters.push_back(std::move(cluster));
    }
    if (j.contains("params")) {
      const auto& p = j.at("params");
      set.params_used.cut_rule =
          cut_rule_from_name(p.value("cut_rule", std::string("mean_pairwise")));
      set.params_used.cut_threshold = p.value("cut_threshold", 0.0);
      set.params_used.w_dyn = p.value("w_dyn", 0.5);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("invalid cluster set: ") + e.what());
  }
  return set;
}

// ---------------------------------------------------------------------------
// Distance matrix CSV
// ---------------------------------------------------------------------------

inline std::string matrix_to_csv(const DistanceMatrix& matrix) {
  std::string out = "id";
  for (const std::string& id : matrix.ids) {
    out += ',';
    out += id;
  }
  out += '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out += matrix.ids[i];
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      out += ',';
      out += fmt_g9(matrix.at(i, j));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suite split and ranking dumps
// ---------------------------------------------------------------------------

inline std::string split_to_json(const SuiteSplit& split) {
  std::string out = "{\"coverage_map\":{";
  bool first = true;
  for (const auto& [test_id, section_ids] : split.coverage_map) {
    if (!first) out += ',';
    first = false;
    json_escape_to(out, test_id);
    out += ":[";
    for (std::size_t i = 0; i < section_ids.size(); ++i) {
      if (i > 0) out += ',';
      json_escape_to(out, section_ids[i]);
    }
    out += ']';
  }
  out += "},\"covered\":[";
  for (std::size_t i = 0; i < split.covered.size(); ++i) {
    if (i > 0) out += ',';
    json_escape_to(out, split.covered[i]);
  }
  out += "],\"surplus\":[";
  for (std::size_t i = 0; i < split.surplus.size(); ++i) {
    if (i > 0) out += ',';
    json_escape_to(out, split.surplus[i]);
  }
  out += "]}\n";
  return out;
}

inline std::string ranking_to_csv(const RankedSuite& ranked) {
  std::string out = kRankingHeader;
  out += '\n';
  std::size_t position = 1;
  auto emit = [&](const std::vector<TestScore>& scores, const char* group) {
    for (const TestScore& s : scores) {
      out += std::to_string(position++);
      out += ',';
      out += group;
      out += ',';
      out += s.test_id;
      out += ',';
      out += fmt_g9(s.g);
      out += ',';
      out += fmt_g9(s.d);
      out += ',';
      out += fmt_g9(s.h);
      out += ',';
      out += fmt_g9(s.p);
      out += '\n';
    }
  };
  emit(ranked.covered_order, "cov");
  emit(ranked.surplus_order, "surplus");
  return out;
}

struct RankingData {
  std::vector<std::string> order;   // full execution order
  std::set<std::string> covered;    // tests in the cov group
};

inline RankingData read_ranking_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) ||
      detail::split_csv_line(line) != detail::split_csv_line(kRankingHeader)) {
    fail(errc::parse_error, "ranking file '" + path + "' has a bad header");
  }
  RankingData data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 7) {
      fail(errc::parse_error, "ranking row with wrong field count: " + line);
    }
    if (fields[1] != "cov" && fields[1] != "surplus") {
      fail(errc::parse_error, "ranking group must be cov or surplus: " + line);
    }
    data.order.push_back(fields[2]);
    if (fields[1] == "cov") data.covered.insert(fields[2]);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Evaluation report
// ---------------------------------------------------------------------------

inline std::string report_to_json(const EvaluationReport& report) {
  auto k_map = [](const std::map<std::size_t, double>& m) {
    std::string out = "[";
    bool first = true;
    for (const auto& [k, v] : m) {
      if (!first) out += ',';
      first = false;
      out += '[';
      out += std::to_string(k);
      out += ',';
      out += fmt_g9(v);
      out += ']';
    }
    out += ']';
    return out;
  };
  std::string out = "{\"apfd\":";
  out += report.apfd ? fmt_g9(*report.apfd) : "null";
  out += ",\"campaign\":";
  json_escape_to(out, report.campaign);
  out += ",\"efd_at_k\":";
  out += k_map(report.efd_at_k);
  out += ",\"efd_random_expected\":";
  out += k_map(report.efd_random_expected);
  out += ",\"efd_random_mc\":";
  out += k_map(report.efd_random_mc);
  out += ",\"failed_tests\":";
  out += std::to_string(report.failed_tests);
  out += ",\"frr_pct\":";
  out += report.frr_pct ? fmt_g9(*report.frr_pct) : "null";
  out += ",\"reduction_pct\":";
  out += fmt_g9(report.reduction_pct);
  out += ",\"seed\":";
  out += std::to_string(report.seed);
  out += ",\"selected_count\":";
  out += std::to_string(report.selected_count);
  out += ",\"total_tests\":";
  out += std::to_string(report.total_tests);
  out += ",\"trials\":";
  out += std::to_string(report.trials);
  out += "}\n";
  return out;
}

/// One CSV row shaped like the campaign summary table: rounded integer
/// percentages, APFD with two decimals, "-" where failures are absent.
inline std::string report_to_table_csv(const EvaluationReport& report) {
  auto pct = [](double v) { return std::to_string(std::llround(v)); };
  std::string out = kTableRowHeader;
  out += '\n';
  out += report.campaign;
  out += ',';
  out += std::to_string(report.total_tests);
  out += ',';
  out += std::to_string(report.failed_tests);
  out += ',';
  out += std::to_string(report.selected_count);
  out += ',';
  out += pct(report.reduction_pct);
  out += ',';
  if (report.failed_tests == 0) {
    out += "-,-,-,-,-\n";
    return out;
  }
  out += report.frr_pct ? pct(*report.frr_pct) : "-";
  out += ',';
  auto lookup = [&](const std::map<std::size_t, double>& m,
                    std::size_t k) -> std::string {
    auto it = m.find(k);
    return it == m.end() ? std::string("-") : pct(it->second);
  };
  out += lookup(report.efd_random_expected, report.selected_count);
  out += ',';
  out += lookup(report.efd_at_k, 10);
  out += ',';
  out += lookup(report.efd_random_expected, 10);
  out += ',';
  if (report.apfd) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", *report.apfd);
    out += buf;
  } else {
    out += '-';
  }
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline configuration
// ---------------------------------------------------------------------------

struct PipelineConfig {
  SegmentationParams segmentation;
  double tau_len = 0.8;
  double kappa_span = 0.0;  // 0 = derive from the campaign's curved sections
  ClusteringParams clustering;
  PriorityParams priority;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::size_t> efd_ks = {10};
  std::size_t mc_trials = 10000;

  SimilarityParams similarity_for(const std::vector<Section>& sections) const {
    SimilarityParams params;
    params.tau_len = tau_len;
    params.kappa_span =
        kappa_span > 0.0 ? kappa_span : campaign_kappa_span(sections);
    params.validate();
    return params;
  }
};

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  try {
    if (j.contains("tau_c")) cfg.segmentation.tau_c = j.at("tau_c").get<double>();
    if (j.contains("window_w")) {
      cfg.segmentation.window_w = j.at("window_w").get<std::size_t>();
    }
    if (j.contains("min_length")) {
      cfg.segmentation.min_length = j.at("min_length").get<double>();
    }
    if (j.contains("tau_len")) cfg.tau_len = j.at("tau_len").get<double>();
    if (j.contains("kappa_span")) cfg.kappa_span = j.at("kappa_span").get<double>();
    if (j.contains("w_dyn")) cfg.clustering.w_dyn = j.at("w_dyn").get<double>();
    if (j.contains("cut_rule")) {
      cfg.clustering.cut_rule =
          cut_rule_from_name(j.at("cut_rule").get<std::string>());
    }
    if (j.contains("cut_threshold")) {
      cfg.clustering.cut_threshold = j.at("cut_threshold").get<double>();
    }
    if (j.contains("alpha")) cfg.priority.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) cfg.priority.beta = j.at("beta").get<double>();
    if (j.contains("failure_bonus")) {
      cfg.priority.failure_bonus = j.at("failure_bonus").get<double>();
    }
    if (j.contains("kappa_thr")) {
      cfg.priority.kappa_thr = j.at("kappa_thr").get<double>();
    }
    if (j.contains("w_cv")) cfg.priority.w_cv = j.at("w_cv").get<double>();
    if (j.contains("w_hc")) cfg.priority.w_hc = j.at("w_hc").get<double>();
    if (j.contains("w_dt")) cfg.priority.w_dt = j.at("w_dt").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("efd_ks")) {
      cfg.efd_ks.clear();
      for (const auto& k : j.at("efd_ks")) {
        cfg.efd_ks.push_back(k.get<std::size_t>());
      }
    }
    if (j.contains("mc_trials")) {
      cfg.mc_trials = j.at("mc_trials").get<std::size_t>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("invalid config: ") + e.what());
  }
  return cfg;
}

inline PipelineConfig read_config_file(const std::string& path) {
  return config_from_json(parse_json_file(path));
}

// ---------------------------------------------------------------------------
// Synthetic campaign spec
// ---------------------------------------------------------------------------

inline std::string synth_spec_to_json(const SynthCampaignSpec& spec) {
  std::string out = "{\"duplicate_factor\":";
  out += std::to_string(spec.duplicate_factor);
  out += ",\"failure_rule\":";
  switch (spec.failure_rule.kind) {
    case FailureRule::Kind::None:
      out += "{\"kind\":\"none\"}";
      break;
    case FailureRule::Kind::RadiusBelow:
      out += "{\"kind\":\"radius_below\",\"radius\":";
      out += fmt_g9(spec.failure_rule.radius);
      out += '}';
      break;
    case FailureRule::Kind::ExplicitRoads: {
      out += "{\"ids\":[";
      bool first = true;
      for (const std::string& id : spec.failure_rule.road_ids) {
        if (!first) out += ',';
        first = false;
        json_escape_to(out, id);
      }
      out += "],\"kind\":\"roads\"}";
      break;
    }
  }
  out += ",\"initial_speed\":";
  out += fmt_g9(spec.initial_speed);
  out += ",\"instability\":[";
  out += fmt_g9(spec.instability_min);
  out += ',';
  out += fmt_g9(spec.instability_max);
  out += "],\"name\":";
  json_escape_to(out, spec.name);
  out += ",\"roads\":[";
  for (std::size_t i = 0; i < spec.roads.size(); ++i) {
    if (i > 0) out += ',';
    out += '[';
    for (std::size_t j = 0; j < spec.roads[i].size(); ++j) {
      if (j > 0) out += ',';
      json_escape_to(out, spec.roads[i][j]);
    }
    out += ']';
  }
  out += "],\"seed\":";
  out += std::to_string(spec.seed);
  out += ",\"telemetry_noise\":{\"cte\":";
  out += fmt_g9(spec.telemetry_noise.cte);
  out += ",\"speed\":";
  out += fmt_g9(spec.telemetry_noise.speed);
  out += ",\"steering\":";
  out += fmt_g9(spec.telemetry_noise.steering);
  out += ",\"yaw_rate\":";
  out += fmt_g9(spec.telemetry_noise.yaw_rate);
  out += "},\"templates\":[";
  for (std::size_t i = 0; i < spec.templates.size(); ++i) {
    const TemplateSpec& t = spec.templates[i];
    if (i > 0) out += ',';
    out += "{\"arc_angle\":";
    out += fmt_g9(t.arc_angle);
    out += ",\"id\":";
    json_escape_to(out, t.id);
    out += ",\"length\":";
    out += fmt_g9(t.length);
    out += ",\"point_spacing\":";
    out += fmt_g9(t.point_spacing);
    out += ",\"radius\":";
    out += fmt_g9(t.radius);
    out += ",\"shape\":\"";
    out += shape_name(t.shape);
    out += "\"}";
  }
  out += "]}\n";
  return out;
}

inline SynthCampaignSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthCampaignSpec spec;
  try {
    spec.name = j.value("name", std::string("synth"));
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.duplicate_factor = j.value("duplicate_factor", std::size_t{1});
    spec.initial_speed = j.value("initial_speed", 12.0);
    if (j.contains("instability")) {
      spec.instability_min = j.at("instability").at(0).get<double>();
      spec.instability_max = j.at("instability").at(1).get<double>();
    }
    if (j.contains("telemetry_noise")) {
      const auto& n = j.at("telemetry_noise");
      spec.telemetry_noise.speed = n.value("speed", 0.0);
      spec.telemetry_noise.steering = n.value("steering", 0.0);
      spec.telemetry_noise.cte = n.value("cte", 0.0);
      spec.telemetry_noise.yaw_rate = n.value("yaw_rate", 0.0);
    }
    for (const auto& jt : j.at("templates")) {
      TemplateSpec tmpl;
      tmpl.id = jt.at("id").get<std::string>();
      tmpl.shape = shape_from_name(jt.at("shape").get<std::string>());
      tmpl.radius = jt.value("radius", 0.0);
      tmpl.length = jt.value("length", 0.0);
      tmpl.arc_angle = jt.value("arc_angle", 0.0);
      tmpl.point_spacing = jt.value("point_spacing", 2.0);
      spec.templates.push_back(std::move(tmpl));
    }
    for (const auto& jr : j.at("roads")) {
      std::vector<std::string> sequence;
      for (const auto& tid : jr) sequence.push_back(tid.get<std::string>());
      spec.roads.push_back(std::move(sequence));
    }
    if (j.contains("failure_rule")) {
      const auto& rule = j.at("failure_rule");
      const std::string kind = rule.value("kind", std::string("none"));
      if (kind == "none") {
        spec.failure_rule.kind = FailureRule::Kind::None;
      } else if (kind == "radius_below") {
        spec.failure_rule.kind = FailureRule::Kind::RadiusBelow;
        spec.failure_rule.radius = rule.at("radius").get<double>();
      } else if (kind == "roads") {
        spec.failure_rule.kind = FailureRule::Kind::ExplicitRoads;
        for (const auto& id : rule.at("ids")) {
          spec.failure_rule.road_ids.insert(id.get<std::string>());
        }
      } else {
        fail(errc::parse_error, "unknown failure_rule kind '" + kind + "'");
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("invalid campaign spec: ") + e.what());
  }
  return spec;
}

}  // namespace roadprio
