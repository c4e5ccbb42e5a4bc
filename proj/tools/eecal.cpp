// eecal: markerless depth-camera to robot-base calibration from EE point clouds.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eecal/commands.hpp"

namespace {

void add_common(CLI::App* cmd, eecal::CommonOptions& o, bool with_icp_flag) {
  cmd->add_option("--config", o.config_path, "pipeline config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "global seed (overrides the config)");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  if (with_icp_flag) cmd->add_flag("--no-icp", o.no_icp, "skip ICP refinement");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markerless camera-to-robot calibration from end-effector point clouds"};
  app.require_subcommand(1);

  eecal::CommonOptions opts;
  std::string dataset;
  long long frame = -1;

  auto* simulate = app.add_subcommand("simulate", "render a synthetic dataset");
  add_common(simulate, opts, false);
  simulate->add_option("--output", opts.output, "dataset directory")->required();

  auto* label = app.add_subcommand("label", "auto-label a dataset from background and calibration");
  label->add_option("dataset", dataset, "dataset directory")->required();
  add_common(label, opts, false);
  label->add_option("--output", opts.output, "relabeled dataset directory")->required();

  auto* calibrate = app.add_subcommand("calibrate", "estimate T_C^B from a dataset");
  calibrate->add_option("dataset", dataset, "dataset directory")->required();
  add_common(calibrate, opts, true);
  calibrate->add_option("--output", opts.output, "result JSON path (stdout when omitted)");

  auto* estimate = app.add_subcommand("estimate", "EE pose candidates for one frame");
  estimate->add_option("dataset", dataset, "dataset directory")->required();
  estimate->add_option("frame", frame, "frame index")->required();
  add_common(estimate, opts, true);
  estimate->add_option("--output", opts.output, "result JSON path (stdout when omitted)");

  auto* evaluate = app.add_subcommand("evaluate", "score pose estimates and calibration against ground truth");
  evaluate->add_option("dataset", dataset, "dataset directory")->required();
  add_common(evaluate, opts, false);
  evaluate->add_option("--output", opts.output, "report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? eecal::kExitOk : eecal::kExitConfig;
  }

  if (simulate->parsed()) return eecal::cmd_simulate(opts, std::cout, std::cerr);
  if (label->parsed()) return eecal::cmd_label(dataset, opts, std::cout, std::cerr);
  if (calibrate->parsed()) return eecal::cmd_calibrate(dataset, opts, std::cout, std::cerr);
  if (estimate->parsed()) return eecal::cmd_estimate(dataset, frame, opts, std::cout, std::cerr);
  return eecal::cmd_evaluate(dataset, opts, std::cout, std::cerr);
}
