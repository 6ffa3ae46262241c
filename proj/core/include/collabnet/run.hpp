#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "collabnet/estimation.hpp"
#include "collabnet/pipeline.hpp"
#include "collabnet/synth.hpp"
#include "collabnet/terms.hpp"

namespace collabnet {

/// {"mode":"binary"|"valued","m":5,"terms":[{"kind":"absdiff",
/// "attribute":"libdem"}, {"kind":"gwesp","decay":0.25}, ...]}
ModelSpec parse_model_spec(std::string_view json);
std::string model_spec_json(const ModelSpec& spec);

/// Coefficients as {"labels":[...],"values":[...]} or a bare array.
std::vector<double> parse_theta(std::string_view json, const std::vector<std::string>& labels);

std::string fit_json(const FitResult& fit);
std::string bootstrap_json(const BootstrapResult& fit);

/// Settings of the end-to-end synthetic run. Every field has a JSON key of
/// the same name; models use the parse_model_spec layout.
struct PipelineConfig {
  int first_year = 2008;
  int last_year = 2013;
  /// Year whose node list anchors alignment; 0 selects first_year.
  int reference_year = 0;
  std::string imputation_rules;  // path, optional
  Weight quantize_m = 5;
  DistanceTransform distance_transform = DistanceTransform::log1p;
  std::vector<double> trim_levels{0.5, 0.25, 0.05};
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  std::size_t nodes = 40;
  std::vector<double> synth_theta{-2.0, -0.5, 1.5};

  ModelSpec tergm_model = default_tergm_model();
  std::size_t bootstrap_replications = 200;
  ModelSpec vergm_model = default_vergm_model();
  /// Years fitted with the valued model; empty selects the last year.
  std::vector<int> vergm_years;
  std::size_t mcmle_samples = 1000;
  std::size_t mcmle_max_iterations = 30;
  std::size_t gof_simulations = 100;

  static ModelSpec default_tergm_model();
  static ModelSpec default_vergm_model();
};

PipelineConfig parse_pipeline_config(std::string_view json);

struct RunSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notes;
};

/// synth -> ingest -> describe -> backbone -> fit (temporal and valued) ->
/// gof -> report, everything written below out_dir.
RunSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir);

}  // namespace collabnet
