#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collabnet/backbone.hpp"
#include "collabnet/descriptives.hpp"
#include "collabnet/estimation.hpp"
#include "collabnet/gof.hpp"
#include "collabnet/graph.hpp"

namespace collabnet {

/// RdYlBu colour for a value in [0,1] (clamped): 0 is the red end, 1 the
/// blue end. NaN maps to grey.
std::string rdylbu(double value);

/// Circle radius for a node of `degree` when the largest degree is
/// `max_degree`; strictly increasing in degree.
double node_radius(std::size_t degree, std::size_t max_degree);

/// One network drawing: nodes coloured by democracy score and sized by
/// degree, isolates left out.
struct NetworkFigure {
  std::string name;
  std::string title;
  BinaryNetwork network;
  std::vector<double> libdem;
};

struct ReportInputs {
  std::vector<NetworkSummary> summaries;
  std::vector<DemocracyChange> democracy;
  std::map<int, std::vector<TrimLevel>> trims;
  std::optional<BootstrapResult> tergm;
  /// Valued fits by year, with optional VIF per statistic.
  std::map<int, FitResult> vergm;
  std::map<int, Eigen::VectorXd> vif;
  std::optional<GofReport> gof;
  std::vector<NetworkFigure> networks;
  std::uint64_t layout_seed = 0;
  std::size_t layout_iterations = 300;
};

struct ReportOutput {
  std::vector<std::filesystem::path> files;
  /// One notice per artifact that could not be produced.
  std::vector<std::string> skipped;
};

/// Writes every artifact whose inputs are present:
///   table1_descriptives.csv, fig1_democracy.csv, fig1_democracy.svg,
///   trim_report.csv, table2_tergm.csv, table3_vergm.csv, vif.csv,
///   gof_degree.csv, gof_esp.csv, gof_geodesic.csv, fig4_gof.svg,
///   network_<name>.svg
/// and skipped.txt listing the rest.
ReportOutput render_report(const ReportInputs& inputs, const std::filesystem::path& out_dir);

/// label,estimate,ci_low,ci_high,significant,display
void write_tergm_table(std::ostream& out, const BootstrapResult& fit);
/// label,<year>... with cells "estimate<stars> (se)".
void write_vergm_table(std::ostream& out, const std::map<int, FitResult>& fits);

std::string network_svg(const NetworkFigure& figure, std::uint64_t seed, std::size_t iterations);
std::string democracy_svg(const std::vector<DemocracyChange>& rows);
std::string gof_svg(const GofReport& report);

}  // namespace collabnet
