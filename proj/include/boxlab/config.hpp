#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxlab/evaluate.hpp"
#include "boxlab/frame.hpp"
#include "boxlab/pose.hpp"

namespace boxlab {

/// All pipeline knobs with their defaults. Every default that the underlying
/// method fixes (lambda, epsilon, solver tolerances, sigma sweep) lives here
/// and is overridable from a TOML config file.
struct PipelineConfig {
  double lambda = 0.8;
  double epsilon = 1e-5;
  double xtol = 1e-8;
  double ftol = 1e-8;
  double sigma_vis = 2.0;
  double sigma_occ = 8.0;
  double conf_floor = 0.1;
  double edge_margin_frac = 0.05;
  double degenerate_area_frac = 0.01;
  int max_refine_iterations = 200;

  RansacParams ransac;
  NoiseSweepConfig sweep;
  AxisPolicy axis_policy = AxisPolicy::quadruped_default();

  UncertaintyParams uncertainty_params() const;
  RefineOptions refine_options() const;
};

/// Loads a TOML-subset config file: `key = value` lines, `[section]` headers,
/// `#` comments; values are numbers, booleans, strings, or flat arrays.
/// Sections: top-level, [ransac], [sweep], [axis_policy]. Unknown keys are
/// rejected.
PipelineConfig load_config(const std::string& path);

/// Applies the same key/value semantics to an in-memory TOML snippet.
PipelineConfig parse_config(const std::string& text,
                            const std::string& origin = "<string>");

}  // namespace boxlab
