// riskcal: FDR-controlled conformal calibration for span-extraction records.
//
// Subcommands: validate (ingest and report problems), calibrate (per-group
// thresholds plus calibration diagnostics), sweep (threshold behavior across
// alpha levels), match (score predictions against gold annotations and emit
// a labeled records file), simulate (deterministic synthetic datasets).
//
// All randomness flows from the --seed flag; no environment variables are
// read. Identical invocations produce byte-identical outputs, regardless of
// --threads.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riskcal/calibration.hpp"
#include "riskcal/conformal.hpp"
#include "riskcal/errors.hpp"
#include "riskcal/matcher.hpp"
#include "riskcal/record.hpp"
#include "riskcal/report.hpp"
#include "riskcal/synthetic.hpp"

#include "CLI11.hpp"

namespace {

namespace fs = std::filesystem;
using namespace riskcal;

struct CommonOpts {
  std::string input;
  std::uint64_t seed = 1;
  double cal_fraction = 0.5;
  std::string grouping = "global";
  std::size_t bins = kDefaultReliabilityBins;
  std::string out_dir = ".";
  std::vector<std::string> formats = {"csv", "md"};
  std::size_t threads = 1;
  int pass_threshold = 3;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << content;
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

bool wants(const std::vector<std::string>& formats, const std::string& f) {
  for (const auto& entry : formats) {
    if (entry == f) return true;
  }
  return false;
}

Dataset load_labeled(const std::string& input, int pass_threshold) {
  Dataset dataset = load_dataset_strict(input);
  ResolveResult resolved = resolve_labels(dataset, pass_threshold);
  if (resolved.n_unresolved > 0) {
    throw ValidationError(
        std::to_string(resolved.n_unresolved) +
        " records carry none of label/fact_score/gold_match (first: " +
        resolved.first_unresolved_id + ")");
  }
  return std::move(resolved.dataset);
}

std::vector<GroupBy> groupings_for(const std::string& mode) {
  if (mode == "global") return {GroupBy{false, false}};
  if (mode == "per-category") return {GroupBy{true, true}};
  if (mode == "both") return {GroupBy{false, false}, GroupBy{true, true}};
  throw ConfigError("unknown grouping '" + mode +
                    "' (expected global, per-category, or both)");
}

int cmd_validate(const std::string& input) {
  LoadResult result = load_dataset(input);
  for (const auto& warning : result.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
  for (const auto& error : result.errors) {
    std::cerr << input << ":" << error.line_number << ": " << error.message
              << '\n';
  }
  std::size_t with_label = 0, with_factscore = 0, with_goldmatch = 0;
  for (const auto& record : result.dataset.records) {
    with_label += record.label.has_value();
    with_factscore += record.fact_score.has_value();
    with_goldmatch += record.gold_match.has_value();
  }
  std::cout << "records: " << result.dataset.records.size() << '\n'
            << "errors: " << result.errors.size() << '\n'
            << "warnings: " << result.warnings.size() << '\n'
            << "with label: " << with_label << '\n'
            << "with fact_score: " << with_factscore << '\n'
            << "with gold_match: " << with_goldmatch << '\n';
  return result.ok() ? 0 : 1;
}

int cmd_calibrate(const CommonOpts& opts, double alpha) {
  Dataset dataset = load_labeled(opts.input, opts.pass_threshold);
  RunOptions run;
  run.cal_fraction = opts.cal_fraction;
  run.threads = opts.threads;

  std::map<GroupKey, GroupCalibration> merged;
  for (GroupBy grouping : groupings_for(opts.grouping)) {
    auto groups = calibrate_groups(dataset, alpha, opts.seed, grouping,
                                   opts.bins, run);
    merged.insert(groups.begin(), groups.end());
  }

  fs::create_directories(opts.out_dir);
  if (wants(opts.formats, "csv")) {
    write_file(fs::path(opts.out_dir) / "calibrate.csv",
               calibrate_csv(merged));
  }
  if (wants(opts.formats, "md")) {
    write_file(fs::path(opts.out_dir) / "calibrate.md",
               calibrate_markdown(merged));
  }
  for (const auto& [key, group] : merged) {
    write_file(fs::path(opts.out_dir) /
                   ("curve_" + sanitize_group_filename(key.label()) + ".csv"),
               curve_to_csv(group.curve));
  }
  std::cout << "calibrated " << merged.size() << " group(s) at alpha "
            << alpha << " over " << dataset.records.size() << " records\n";
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::vector<double>& alphas) {
  Dataset dataset = load_labeled(opts.input, opts.pass_threshold);
  RunOptions run;
  run.cal_fraction = opts.cal_fraction;
  run.threads = opts.threads;

  std::map<GroupKey, std::vector<SweepRow>> merged;
  for (GroupBy grouping : groupings_for(opts.grouping)) {
    auto rows = sweep(dataset, alphas, grouping, opts.seed, run);
    merged.insert(rows.begin(), rows.end());
  }

  fs::create_directories(opts.out_dir);
  if (wants(opts.formats, "csv")) {
    write_file(fs::path(opts.out_dir) / "sweep.csv", sweep_csv(merged));
  }
  if (wants(opts.formats, "md")) {
    write_file(fs::path(opts.out_dir) / "sweep.md", sweep_markdown(merged));
  }
  std::cout << "swept " << alphas.size() << " alpha level(s) across "
            << merged.size() << " group(s)\n";
  return 0;
}

int cmd_match(const CommonOpts& opts, const std::string& gold_path,
              const std::string& pred_relations_path) {
  Dataset predictions = load_dataset_strict(opts.input);
  GoldCorpus gold = load_gold(gold_path);
  RelationsByDoc pred_relations;
  if (!pred_relations_path.empty()) {
    pred_relations = relations_by_doc(load_gold(pred_relations_path));
  }

  MatchReport report = match_against_gold(predictions, gold, pred_relations);
  for (const auto& warning : report.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }

  fs::create_directories(opts.out_dir);
  save_dataset(report.labeled,
               (fs::path(opts.out_dir) / "labeled.jsonl").string());
  if (wants(opts.formats, "csv")) {
    write_file(fs::path(opts.out_dir) / "match.csv",
               match_csv(report.entities, report.relations));
  }
  if (wants(opts.formats, "md")) {
    write_file(fs::path(opts.out_dir) / "match.md",
               match_markdown(report.entities, report.relations,
                              report.warnings));
  }
  std::cout << "entity P/R/F1: " << report.entities.precision << '/'
            << report.entities.recall << '/' << report.entities.f1
            << " (tp=" << report.entities.tp << " fp=" << report.entities.fp
            << " fn=" << report.entities.fn << ")\n";
  return 0;
}

int cmd_simulate(const std::string& preset_name, const std::string& config_path,
                 std::optional<std::size_t> n_override,
                 std::optional<std::uint64_t> seed_override,
                 const std::string& out_path) {
  RegimeConfig config;
  if (!config_path.empty()) {
    config = load_regime_config(config_path);
  } else {
    config = preset(preset_name);
  }
  if (n_override.has_value()) config.n = *n_override;
  if (seed_override.has_value()) config.seed = *seed_override;

  Dataset dataset = generate(config);
  if (dataset.records.empty()) {
    std::cerr << "warning: generated an empty dataset (n=0)\n";
  }
  if (fs::path(out_path).has_parent_path()) {
    fs::create_directories(fs::path(out_path).parent_path());
  }
  save_dataset(dataset, out_path);
  std::cout << "wrote " << dataset.records.size() << " records to "
            << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FDR-controlled conformal calibration for span extraction"};
  app.require_subcommand(1);

  CommonOpts opts;
  double alpha_single = 0.05;
  std::vector<double> alphas;
  std::string gold_path;
  std::string pred_relations_path;
  std::string preset_name;
  std::string config_path;
  std::optional<std::size_t> n_override;
  std::optional<std::uint64_t> seed_override;
  std::string sim_out = "records.jsonl";

  auto add_common = [&opts](CLI::App* cmd, bool with_model_opts) {
    cmd->add_option("--input", opts.input, "records JSONL file")->required();
    if (with_model_opts) {
      cmd->add_option("--seed", opts.seed, "split seed (default 1)");
      cmd->add_option("--cal-fraction", opts.cal_fraction,
                      "calibration fraction of the split (default 0.5)");
      cmd->add_option("--grouping", opts.grouping,
                      "global, per-category, or both (default global)");
      cmd->add_option("--threads", opts.threads,
                      "parallelism for per-group work (default 1)");
      cmd->add_option("--pass-threshold", opts.pass_threshold,
                      "fact_score required for label 1 (default 3)");
    }
    cmd->add_option("--out", opts.out_dir, "output directory (default .)");
    cmd->add_option("--format", opts.formats,
                    "output formats: csv, md (default both)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a records file");
  validate->add_option("--input", opts.input, "records JSONL file")
      ->required();

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "fit per-group FDR thresholds");
  add_common(calibrate, true);
  calibrate->add_option("--alpha", alpha_single,
                        "target FDR level (default 0.05)");
  calibrate->add_option("--bins", opts.bins,
                        "reliability curve bins (default 10)");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "sweep thresholds across alpha levels");
  add_common(sweep_cmd, true);
  sweep_cmd
      ->add_option("--alpha", alphas, "target FDR level (repeatable)")
      ->required();

  CLI::App* match =
      app.add_subcommand("match", "score predictions against gold");
  add_common(match, false);
  match->add_option("--gold", gold_path, "gold annotations JSONL")->required();
  match->add_option("--pred-relations", pred_relations_path,
                    "predicted relations JSONL (same layout as gold)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "generate a synthetic records file");
  CLI::Option* preset_opt = simulate->add_option(
      "--preset", preset_name, "underconfident-structured or overconfident-freetext");
  simulate->add_option("--config", config_path, "regime config JSON file")
      ->excludes(preset_opt);
  simulate->add_option("--n", n_override, "record count override");
  simulate->add_option("--seed", seed_override, "generator seed override");
  simulate->add_option("--out", sim_out,
                       "output records file (default records.jsonl)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) return cmd_validate(opts.input);
    if (calibrate->parsed()) return cmd_calibrate(opts, alpha_single);
    if (sweep_cmd->parsed()) return cmd_sweep(opts, alphas);
    if (match->parsed())
      return cmd_match(opts, gold_path, pred_relations_path);
    if (simulate->parsed()) {
      if (preset_name.empty() && config_path.empty()) {
        throw ConfigError("simulate needs --preset or --config");
      }
      return cmd_simulate(preset_name, config_path, n_override, seed_override,
                          sim_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
