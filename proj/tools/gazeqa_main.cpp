// gazeqa: eye-tracking signal quality analysis from raw gaze-vector
// recordings. Subcommands: analyze, generate, export-figures.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "gazeqa/report.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDataError = 2;
constexpr int kExitAnalysisError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eye-tracking signal quality analysis"};
  app.require_subcommand(1);

  gazeqa::AnalyzeOptions analyze_opts;
  std::string window_name = "data_driven";
  auto* analyze = app.add_subcommand(
      "analyze", "Run the full quality pipeline over a dataset manifest");
  analyze->add_option("manifest", analyze_opts.manifest_path,
                      "Dataset manifest JSON")->required();
  analyze->add_option("--out", analyze_opts.out_dir,
                      "Output directory for the report and tables")->required();
  analyze->add_option("--window", window_name,
                      "Stable-window policy: data_driven or paper_fixed");
  analyze->add_option("--tolerance-factor", analyze_opts.tolerance_factor,
                      "data_driven window tolerance factor");
  analyze->add_flag("--recalibrate", analyze_opts.recalibrate,
                    "Fit each subject's grid task and report a recalibrated condition");
  analyze->add_option("--drop-threshold-ms", analyze_opts.drop_threshold_ms,
                      "ISI above this counts as a dropped sample");
  analyze->add_option("--alpha", analyze_opts.alpha,
                      "Significance level for crosstalk model selection");
  analyze->add_flag("--pooled-mean", analyze_opts.pooled_mean,
                    "Mean aggregates pool all fixations instead of per-subject means");
  analyze->add_flag("--timestamp", analyze_opts.include_timestamp,
                    "Record the wall-clock time in the report provenance");

  gazeqa::GenerateOptions generate_opts;
  auto* generate = app.add_subcommand(
      "generate", "Write synthetic recordings with known ground truth");
  generate->add_option("config", generate_opts.config_path,
                       "Generator config JSON")->required();
  generate->add_option("--out", generate_opts.out_dir,
                       "Output directory")->required();

  gazeqa::ExportOptions export_opts;
  auto* export_figs = app.add_subcommand(
      "export-figures", "Emit plot data from an analysis directory");
  export_figs->add_option("analysis_dir", export_opts.analysis_dir,
                          "Directory written by analyze")->required();
  export_figs->add_option("--out", export_opts.out_dir,
                          "Output directory")->required();
  export_figs->add_option("--bin-width", export_opts.bin_width,
                          "Histogram bin width, degrees");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*analyze) {
      analyze_opts.window = gazeqa::window_policy_from_string(window_name);
      const gazeqa::QualityReport rep = gazeqa::run_analyze(analyze_opts);
      gazeqa::write_report_files(rep, analyze_opts.out_dir);
      std::cout << "report written to "
                << (analyze_opts.out_dir / "report.json").string() << "\n";
    } else if (*generate) {
      gazeqa::run_generate(generate_opts);
      std::cout << "dataset written to " << generate_opts.out_dir.string()
                << "\n";
    } else if (*export_figs) {
      gazeqa::run_export_figures(export_opts);
      std::cout << "figure data written to " << export_opts.out_dir.string()
                << "\n";
    }
  } catch (const gazeqa::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const gazeqa::AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return kExitAnalysisError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysisError;
  }
  return 0;
}
