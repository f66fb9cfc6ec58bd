#include "boxlab/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boxlab/error.hpp"
#include "boxlab/pipeline.hpp"
#include "boxlab/render.hpp"

namespace boxlab {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDegenerate = 3;

std::string default_label_path(const std::string& scene_path) {
  const std::string suffix = ".json";
  std::string stem = scene_path;
  if (stem.size() > suffix.size() &&
      stem.substr(stem.size() - suffix.size()) == suffix) {
    stem.resize(stem.size() - suffix.size());
  }
  return stem + ".label.json";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << content;
}

struct SweepCsvParser {
  std::vector<double> sigmas;

  void parse(const std::string& csv) {
    sigmas.clear();
    std::stringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
      if (token.empty()) continue;
      sigmas.push_back(std::stod(token));
    }
    if (sigmas.empty()) {
      throw CLI::ValidationError("--sigmas", "expected comma-separated values");
    }
  }
};

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{"3D bounding-box label generation from fitted animal meshes"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "TOML config overriding the pipeline defaults");

  // label
  auto* label_cmd =
      app.add_subcommand("label", "generate a 3D box label for one scene");
  std::string label_scene;
  std::string label_out;
  std::uint64_t label_seed = 42;
  label_cmd->add_option("scene", label_scene, "scene JSON descriptor")
      ->required();
  label_cmd->add_option("--out", label_out, "output label path");
  label_cmd->add_option("--seed", label_seed, "RANSAC seed");

  // evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "compare basic vs refined over a scene directory");
  std::string eval_dir;
  std::string eval_report;
  std::uint64_t eval_seed = 42;
  eval_cmd->add_option("scene-dir", eval_dir, "directory with *.scene.json")
      ->required();
  eval_cmd->add_option("--report", eval_report, "write the JSON report here");
  eval_cmd->add_option("--seed", eval_seed, "RANSAC seed");

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "keypoint-noise stability sweep (anatomical vs PCA)");
  std::string sweep_scene;
  std::string sweep_report;
  std::string sweep_sigmas;
  int sweep_trials = -1;
  std::uint64_t sweep_seed = 0;
  bool sweep_seed_set = false;
  sweep_cmd->add_option("scene", sweep_scene, "scene JSON descriptor")
      ->required();
  sweep_cmd->add_option("--sigmas", sweep_sigmas,
                        "comma-separated pixel noise levels");
  sweep_cmd->add_option("--trials", sweep_trials, "trials per sigma");
  sweep_cmd
      ->add_option_function<std::uint64_t>(
          "--seed",
          [&](std::uint64_t v) {
            sweep_seed = v;
            sweep_seed_set = true;
          },
          "sweep RNG seed")
      ->expected(1);
  sweep_cmd->add_option("--report", sweep_report, "write the JSON report here");

  // render
  auto* render_cmd =
      app.add_subcommand("render", "render a label overlay (SVG, optional PNG)");
  std::string render_scene, render_label, render_out;
  bool render_png = false;
  render_cmd->add_option("scene", render_scene, "scene JSON descriptor")
      ->required();
  render_cmd->add_option("label", render_label, "label JSON")->required();
  render_cmd->add_option("out", render_out, "output path (extension replaced)")
      ->required();
  render_cmd->add_flag("--png", render_png, "also write a raster PNG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    PipelineConfig config;
    if (!config_path.empty()) config = load_config(config_path);

    if (label_cmd->parsed()) {
      const SceneInput scene = parse_scene({label_scene});
      const LabelOutcome outcome = run_label(scene, config, label_seed, true);
      const std::string out_path =
          label_out.empty() ? default_label_path(label_scene) : label_out;
      save_label(out_path, outcome.label);
      std::cout << "label written to " << out_path << "\n";
      if (outcome.label.degenerate) {
        std::cerr << "degenerate result: " << outcome.label.degenerate_reason
                  << "\n";
        return kExitDegenerate;
      }
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      const DirectoryReport report =
          evaluate_directory(eval_dir, config, eval_seed);
      std::cout << directory_report_table(report);
      if (!eval_report.empty()) {
        write_file(eval_report, directory_report_json(report));
      }
      if (report.processed == 0) return kExitData;
      if (report.refined_degenerate == report.processed) {
        return kExitDegenerate;
      }
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      NoiseSweepConfig sweep = config.sweep;
      if (!sweep_sigmas.empty()) {
        SweepCsvParser parser;
        parser.parse(sweep_sigmas);
        sweep.sigmas = parser.sigmas;
      }
      if (sweep_trials > 0) sweep.trials_per_sigma = sweep_trials;
      if (sweep_seed_set) sweep.seed = sweep_seed;

      const SceneInput scene = parse_scene({sweep_scene});
      const EvalScene eval = make_eval_scene(scene, config, sweep.seed);
      const StabilityPair pair = stability_sweep(eval, sweep);
      std::cout << sweep_report_table(pair);
      if (!sweep_report.empty()) {
        write_file(sweep_report, sweep_report_json(pair, sweep));
      }
      return kExitOk;
    }

    if (render_cmd->parsed()) {
      const SceneInput scene = parse_scene({render_scene});
      const Label3D label = load_label(render_label);
      const RenderResult result =
          render_overlay(scene, label, render_out, render_png);
      std::cout << "overlay written to " << result.svg_path << "\n";
      if (result.refused) {
        std::cerr << "label is degenerate (" << label.degenerate_reason
                  << "); watermark emitted\n";
        return kExitDegenerate;
      }
      return kExitOk;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace boxlab
