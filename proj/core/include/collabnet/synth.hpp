#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "collabnet/graph.hpp"
#include "collabnet/io.hpp"
#include "collabnet/pipeline.hpp"
#include "collabnet/terms.hpp"

namespace collabnet {

/// Synthetic country-collaboration fixture.
///
/// Attributes per node (fixed draws, small yearly drift):
///   libdem ~ Beta(2,2), drift N(0, 0.02) clipped to [0,1]
///   ln_gdp_pc ~ N(9, 1.2), +0.02 per year
///   ln_population ~ N(16, 1.5)
///   urbanization ~ U(20, 95)
///   ln_authors ~ N(7, 1.5), +0.05 per year
///   region uniform over R01..R10
///   coordinates uniform on a square of side 4000 km
/// Tie presence in year t follows the binary model given by `presence`
/// and `presence_theta`, with the previous year's presence as memory lag
/// (an empty lag in the first year) and time index t + 1. Present ties get
/// weight 1 + floor(exp(mu + sigma Z)), mu rising with both endpoints'
/// ln_authors, so weights are heavy tailed.
struct SynthConfig {
  std::size_t nodes = 40;
  int first_year = 2008;
  std::size_t years = 6;
  std::uint64_t seed = 1;
  ModelSpec presence = default_presence_model();
  std::vector<double> presence_theta{-2.0, -0.5, 1.5};
  double weight_intercept = 1.0;
  double weight_authors = 0.6;
  double weight_sigma = 1.2;
  /// Emit one two-country publication per unit of weight.
  bool publications = true;
  /// Proposals per dyad before keeping a year's network.
  std::size_t sweeps = 20;

  /// edges, absdiff.libdem, memory.
  static ModelSpec default_presence_model();
};

struct SyntheticData {
  NetworkSeries series;
  std::vector<BinaryNetwork> presence;
  AttributePanel panel;
  /// Euclidean distances in km.
  SquareMatrix distances_km;
  /// ln(km + 1).
  EdgeCovariateMatrix distance;
  std::vector<PublicationRecord> publications;
  std::vector<double> presence_theta;
  /// Set when some year came out (nearly) empty or complete.
  bool degenerate = false;
  std::vector<std::string> warnings;
};

SyntheticData generate_synthetic(const SynthConfig& config);

/// Attribute snapshot plus covariates for one year, in `nodes` order.
ModelData model_data(const AttributePanel& panel, const NodeList& nodes, int year,
                     std::map<std::string, EdgeCovariateMatrix> covariates = {});

/// Adjusts presence_theta[edges_index] until the mean yearly density is
/// within `tolerance` of `target`, using the logit shift of the observed
/// density each round. Returns the calibrated config.
SynthConfig calibrate_density(SynthConfig config, double target, std::size_t edges_index = 0,
                              double tolerance = 0.01, std::size_t max_rounds = 20);

/// Node code for index k: AAA, AAB, ..., AAZ, ABA, ...
std::string synthetic_code(std::size_t k);

}  // namespace collabnet
