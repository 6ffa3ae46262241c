#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "collabnet/estimation.hpp"
#include "collabnet/graph.hpp"
#include "collabnet/terms.hpp"

namespace collabnet {

/// Degree, edgewise shared partner and geodesic histograms of one graph.
struct AuxiliaryStatistics {
  /// Node counts by degree 0..n-1.
  std::vector<double> degree;
  /// Edge counts by shared-partner count 0..n-2.
  std::vector<double> esp;
  /// Dyad counts by distance 1..n-1; the last slot counts unreachable dyads.
  std::vector<double> geodesic;
};

AuxiliaryStatistics auxiliary_statistics(const BinaryNetwork& net);

/// One statistic family: observed histogram against the simulated 5/50/95
/// percent envelope.
struct GofFamily {
  std::string name;
  std::vector<std::string> bins;
  std::vector<double> observed;
  std::vector<double> q05;
  std::vector<double> q50;
  std::vector<double> q95;
  std::vector<bool> covered;
  /// Bins where the observed value or any simulated value is nonzero.
  std::vector<bool> informative;

  std::size_t informative_bins() const;
  std::size_t covered_informative_bins() const;
};

struct GofReport {
  GofFamily degree;
  GofFamily esp;
  GofFamily geodesic;
  std::size_t simulations = 0;

  /// Share of informative bins (over all three families) inside the
  /// envelope.
  double coverage() const;
};

struct GofOptions {
  std::size_t simulations = 100;
  std::uint64_t seed = 0;
  /// 0 selects 10 * dyads.
  std::size_t burn_in = 0;
  /// 0 selects the number of dyads.
  std::size_t interval = 0;
  std::size_t threads = 1;
  /// Simulate even when the fit reports non-convergence.
  bool allow_nonconverged = false;
};

/// Simulates networks at the fitted coefficients (chain started at the
/// observed network) and compares auxiliary statistics.
GofReport gof_binary(const FitResult& fit, const Model& model, const BinaryNetwork& observed,
                     const GofOptions& options = {});

/// Valued fits have no goodness-of-fit procedure; always throws.
[[noreturn]] void gof_valued(const FitResult& fit);

/// bin,observed,q05,q50,q95,covered
void write_gof_csv(std::ostream& out, const GofFamily& family);

}  // namespace collabnet
