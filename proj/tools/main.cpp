// Command-line front end for the road-scenario test selection and
// prioritization pipeline. Stages communicate through plain files
// (roads JSON, sections JSONL, cluster-set JSON, ranking CSV) so partial
// pipelines and external tooling stay possible.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "roadprio/io.hpp"
#include "roadprio/pipeline.hpp"

namespace {

using namespace roadprio;

struct GlobalOptions {
  std::string config_path;
  // Parameter overrides; only applied when the flag was passed.
  double tau_c = 0.0;
  std::size_t window_w = 0;
  double min_length = 0.0;
  double tau_len = 0.0;
  double kappa_span = 0.0;
  double w_dyn = 0.0;
  std::string cut_rule;
  double cut_threshold = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double failure_bonus = 0.0;
  double kappa_thr = 0.0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::size_t trials = 0;
  bool emit_matrix = false;
};

PipelineConfig resolve_config(const CLI::App& app, const GlobalOptions& opt) {
  PipelineConfig cfg;
  if (!opt.config_path.empty()) cfg = read_config_file(opt.config_path);
  auto passed = [&app](const std::string& name) {
    const CLI::Option* option = app.get_option_no_throw(name);
    return option != nullptr && option->count() > 0;
  };
  if (passed("--tau-c")) cfg.segmentation.tau_c = opt.tau_c;
  if (passed("--window")) cfg.segmentation.window_w = opt.window_w;
  if (passed("--min-length")) cfg.segmentation.min_length = opt.min_length;
  if (passed("--tau-len")) cfg.tau_len = opt.tau_len;
  if (passed("--kappa-span")) cfg.kappa_span = opt.kappa_span;
  if (passed("--w-dyn")) cfg.clustering.w_dyn = opt.w_dyn;
  if (passed("--cut-rule")) {
    cfg.clustering.cut_rule = cut_rule_from_name(opt.cut_rule);
  }
  if (passed("--cut-threshold")) {
    cfg.clustering.cut_threshold = opt.cut_threshold;
  }
  if (passed("--alpha")) cfg.priority.alpha = opt.alpha;
  if (passed("--beta")) cfg.priority.beta = opt.beta;
  if (passed("--failure-bonus")) cfg.priority.failure_bonus = opt.failure_bonus;
  if (passed("--kappa-thr")) cfg.priority.kappa_thr = opt.kappa_thr;
  if (passed("--seed")) cfg.seed = opt.seed;
  if (passed("--threads")) cfg.threads = opt.threads;
  if (passed("--trials")) cfg.mc_trials = opt.trials;
  cfg.segmentation.validate();
  cfg.clustering.validate();
  cfg.priority.validate();
  return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<TestOutcome> load_history(const std::string& path) {
  if (path.empty()) return {};
  if (!std::filesystem::exists(path)) {
    std::cerr << "warning: history file '" << path
              << "' not found; treating every test as never failed\n";
    return {};
  }
  return read_outcomes_csv(path);
}

void write_matrices(const std::vector<std::pair<ShapeLabel, DistanceMatrix>>& matrices,
                    const std::string& prefix) {
  for (const auto& [shape, matrix] : matrices) {
    write_text_file(prefix + shape_name(shape) + ".csv", matrix_to_csv(matrix));
  }
}

int run_segment(const std::string& roads_path, const std::string& out_path,
                const PipelineConfig& cfg) {
  const CampaignInput input = read_roads_file(roads_path);
  const auto sections = segment_campaign(input.roads, cfg.segmentation);
  write_text_file(out_path, sections_to_jsonl(sections));
  std::cout << "segmented " << input.roads.size() << " roads into "
            << sections.size() << " sections\n";
  return 0;
}

int run_cluster(const std::string& sections_path, const std::string& telemetry_path,
                const std::string& out_path, const std::string& matrix_prefix,
                bool emit_matrix, const PipelineConfig& cfg) {
  const auto sections = read_sections_jsonl(sections_path);
  TelemetryMap telemetry;
  if (!telemetry_path.empty()) telemetry = read_telemetry_csv(telemetry_path);
  const ClusterStageResult stage =
      run_cluster_stage(sections, telemetry, cfg, emit_matrix);
  print_warnings(stage.warnings);
  write_text_file(out_path, clusterset_to_json(stage.clusters));
  if (emit_matrix) {
    const std::string prefix =
        matrix_prefix.empty() ? out_path + ".matrix." : matrix_prefix;
    write_matrices(stage.matrices, prefix);
  }
  std::cout << "clustered " << sections.size() << " sections into "
            << stage.clusters.clusters.size() << " clusters\n";
  return 0;
}

int run_select(const std::string& clusters_path, const std::string& sections_path,
               const std::string& telemetry_path, const std::string& history_path,
               const std::string& split_out, const std::string& ranking_out,
               const PipelineConfig& cfg) {
  const ClusterSet clusters = read_clusterset_json(clusters_path);
  const auto sections = read_sections_jsonl(sections_path);
  TelemetryMap telemetry;
  if (!telemetry_path.empty()) telemetry = read_telemetry_csv(telemetry_path);
  const auto history = load_history(history_path);
  const SelectStageResult stage =
      run_select_stage(sections, clusters, telemetry, history, cfg);
  print_warnings(stage.warnings);
  if (!split_out.empty()) write_text_file(split_out, split_to_json(stage.split));
  write_text_file(ranking_out, ranking_to_csv(stage.ranked));
  std::cout << "selected " << stage.split.covered.size() << " of "
            << stage.split.covered.size() + stage.split.surplus.size()
            << " tests\n";
  return 0;
}

int run_evaluate(const std::string& ranking_path, const std::string& outcomes_path,
                 const std::string& campaign, const std::string& out_path,
                 const std::string& csv_out, const PipelineConfig& cfg) {
  const RankingData ranking = read_ranking_csv(ranking_path);
  const auto outcomes = read_outcomes_csv(outcomes_path);
  const EvaluationReport report =
      run_evaluate_stage(campaign, ranking, outcomes, cfg);
  write_text_file(out_path, report_to_json(report));
  if (!csv_out.empty()) write_text_file(csv_out, report_to_table_csv(report));
  std::cout << report_to_table_csv(report);
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir,
              const std::optional<std::uint64_t>& seed_override) {
  SynthCampaignSpec spec = synth_spec_from_json(parse_json_file(spec_path));
  if (seed_override) spec.seed = *seed_override;
  const SynthCampaign campaign = generate_campaign(spec);
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  write_text_file((dir / "roads.json").string(),
                  roads_to_json(campaign.name, campaign.roads));
  write_text_file((dir / "telemetry.csv").string(),
                  telemetry_to_csv(campaign.telemetry));
  write_text_file((dir / "outcomes.csv").string(),
                  outcomes_to_csv(campaign.outcomes));
  std::cout << "generated " << campaign.roads.size() << " roads into "
            << out_dir << "\n";
  return 0;
}

int run_report(const std::string& roads_path, const std::string& telemetry_path,
               const std::string& outcomes_path, const std::string& history_path,
               const std::string& out_dir, bool emit_matrix,
               const PipelineConfig& cfg) {
  const CampaignInput input = read_roads_file(roads_path);
  TelemetryMap telemetry;
  if (!telemetry_path.empty()) telemetry = read_telemetry_csv(telemetry_path);
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);

  const auto sections = segment_campaign(input.roads, cfg.segmentation);
  write_text_file((dir / "sections.jsonl").string(), sections_to_jsonl(sections));

  const ClusterStageResult clusters =
      run_cluster_stage(sections, telemetry, cfg, emit_matrix);
  print_warnings(clusters.warnings);
  write_text_file((dir / "clusters.json").string(),
                  clusterset_to_json(clusters.clusters));
  if (emit_matrix) {
    write_matrices(clusters.matrices, (dir / "matrix.").string());
  }

  const auto history = load_history(history_path);
  const SelectStageResult selection =
      run_select_stage(sections, clusters.clusters, telemetry, history, cfg);
  print_warnings(selection.warnings);
  write_text_file((dir / "split.json").string(), split_to_json(selection.split));
  write_text_file((dir / "ranking.csv").string(),
                  ranking_to_csv(selection.ranked));

  RankingData ranking;
  ranking.order = execution_order(selection.ranked);
  ranking.covered.insert(selection.split.covered.begin(),
                         selection.split.covered.end());
  const auto outcomes = read_outcomes_csv(outcomes_path);
  const EvaluationReport report =
      run_evaluate_stage(input.name, ranking, outcomes, cfg);
  write_text_file((dir / "report.json").string(), report_to_json(report));
  write_text_file((dir / "report_row.csv").string(),
                  report_to_table_csv(report));
  std::cout << report_to_table_csv(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-guided selection and prioritization of road-scenario "
               "regression tests"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opt;
  app.add_option("--config", opt.config_path, "Pipeline configuration JSON");
  app.add_option("--tau-c", opt.tau_c, "Curvature threshold (1/m)");
  app.add_option("--window", opt.window_w, "Hysteresis window (points)");
  app.add_option("--min-length", opt.min_length, "Minimum section length (m)");
  app.add_option("--tau-len", opt.tau_len, "Length ratio threshold");
  app.add_option("--kappa-span", opt.kappa_span,
                 "DTW cost normalization span (0 = campaign maximum)");
  app.add_option("--w-dyn", opt.w_dyn, "Dynamic weight in the hybrid distance");
  app.add_option("--cut-rule", opt.cut_rule,
                 "Cluster cut rule: mean_pairwise | mean_plus_half_std | fixed");
  app.add_option("--cut-threshold", opt.cut_threshold,
                 "Fixed cluster cut threshold");
  app.add_option("--alpha", opt.alpha, "Geometric score weight");
  app.add_option("--beta", opt.beta, "Dynamic score weight");
  app.add_option("--failure-bonus", opt.failure_bonus,
                 "Historical failure bonus");
  app.add_option("--kappa-thr", opt.kappa_thr,
                 "High-curvature section threshold (1/m)");
  app.add_option("--seed", opt.seed, "Random seed");
  app.add_option("--threads", opt.threads, "Worker threads");
  app.add_option("--trials", opt.trials, "Monte Carlo trials");
  app.add_flag("--emit-matrix", opt.emit_matrix,
               "Also dump per-shape distance matrices (CSV)");

  std::string roads_path, sections_path, telemetry_path, outcomes_path;
  std::string clusters_path, ranking_path, history_path, spec_path;
  std::string out_path, split_out, ranking_out, csv_out, out_dir, matrix_prefix;
  std::string campaign = "campaign";
  std::vector<std::size_t> ks;

  CLI::App* segment = app.add_subcommand("segment", "Segment roads by curvature");
  segment->add_option("--roads", roads_path, "Roads JSON file")->required();
  segment->add_option("--out", out_path, "Sections JSONL output")->required();

  CLI::App* cluster =
      app.add_subcommand("cluster", "Cluster sections by hybrid distance");
  cluster->add_option("--sections", sections_path, "Sections JSONL")->required();
  cluster->add_option("--telemetry", telemetry_path, "Telemetry CSV");
  cluster->add_option("--out", out_path, "Cluster set JSON output")->required();
  cluster->add_option("--matrix-prefix", matrix_prefix,
                      "Prefix for --emit-matrix CSV files");

  auto add_select_options = [&](CLI::App* cmd) {
    cmd->add_option("--clusters", clusters_path, "Cluster set JSON")->required();
    cmd->add_option("--sections", sections_path, "Sections JSONL")->required();
    cmd->add_option("--telemetry", telemetry_path, "Telemetry CSV");
    cmd->add_option("--history", history_path, "Prior outcomes CSV");
    cmd->add_option("--split-out", split_out, "Suite split JSON output");
    cmd->add_option("--ranking-out", ranking_out, "Ranking CSV output")
        ->required();
  };
  CLI::App* select =
      app.add_subcommand("select", "Split the suite and rank the tests");
  add_select_options(select);
  CLI::App* prioritize =
      app.add_subcommand("prioritize", "Alias of select (split plus ranking)");
  add_select_options(prioritize);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score a ranking against outcomes");
  evaluate->add_option("--ranking", ranking_path, "Ranking CSV")->required();
  evaluate->add_option("--outcomes", outcomes_path, "Outcomes CSV")->required();
  evaluate->add_option("--campaign", campaign, "Campaign name for the report");
  evaluate->add_option("--out", out_path, "Report JSON output")->required();
  evaluate->add_option("--csv-out", csv_out, "Summary table row output");
  evaluate->add_option("--k", ks, "Extra EFD prefix lengths");

  CLI::App* synth =
      app.add_subcommand("synth", "Generate a synthetic campaign");
  synth->add_option("--spec", spec_path, "Campaign spec JSON")->required();
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  CLI::App* report =
      app.add_subcommand("report", "Run the full pipeline end to end");
  report->add_option("--roads", roads_path, "Roads JSON file")->required();
  report->add_option("--telemetry", telemetry_path, "Telemetry CSV");
  report->add_option("--outcomes", outcomes_path, "Outcomes CSV")->required();
  report->add_option("--history", history_path, "Prior outcomes CSV");
  report->add_option("--out-dir", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    PipelineConfig cfg = resolve_config(app, opt);
    if (!ks.empty()) {
      cfg.efd_ks.insert(cfg.efd_ks.end(), ks.begin(), ks.end());
    }
    if (segment->parsed()) return run_segment(roads_path, out_path, cfg);
    if (cluster->parsed()) {
      return run_cluster(sections_path, telemetry_path, out_path, matrix_prefix,
                         opt.emit_matrix, cfg);
    }
    if (select->parsed() || prioritize->parsed()) {
      return run_select(clusters_path, sections_path, telemetry_path,
                        history_path, split_out, ranking_out, cfg);
    }
    if (evaluate->parsed()) {
      return run_evaluate(ranking_path, outcomes_path, campaign, out_path,
                          csv_out, cfg);
    }
    if (synth->parsed()) {
      std::optional<std::uint64_t> seed_override;
      const CLI::Option* seed_option = app.get_option_no_throw("--seed");
      if (seed_option != nullptr && seed_option->count() > 0) {
        seed_override = opt.seed;
      }
      return run_synth(spec_path, out_dir, seed_override);
    }
    if (report->parsed()) {
      return run_report(roads_path, telemetry_path, outcomes_path, history_path,
                        out_dir, opt.emit_matrix, cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == errc::parse_error ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
