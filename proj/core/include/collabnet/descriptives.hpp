#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "collabnet/graph.hpp"

namespace collabnet {

/// Whole-network statistics for one network-year. Everything except the
/// weight columns is computed on the weight >= 1 binary view.
struct NetworkSummary {
  int year = 0;
  std::size_t nodes = 0;
  std::size_t isolates = 0;
  std::size_t total_edges = 0;
  std::uint64_t total_weight = 0;
  Weight max_weight = 0;
  std::size_t components = 0;
  double density = 0.0;
  double centralization = 0.0;
  std::uint64_t closed_triads = 0;

  bool operator==(const NetworkSummary&) const = default;
};

/// 2E / (n(n-1)). Requires n >= 2.
double density(const BinaryNetwork& net);

/// Freeman degree centralization sum_i (d_max - d_i) / ((n-1)(n-2)).
/// Requires n >= 3.
double degree_centralization(const BinaryNetwork& net);

/// Number of node triples with all three ties present. Requires n >= 3.
std::uint64_t closed_triads(const BinaryNetwork& net);

/// C(n, 3). Requires n >= 3.
std::uint64_t possible_triads(std::size_t n);

struct ComponentCount {
  std::size_t components = 0;
  std::size_t isolates = 0;
};

/// Connected components, counting each isolate as its own component.
ComponentCount components_and_isolates(const BinaryNetwork& net);

/// Component label per node (labels are 0..components-1 in order of first
/// appearance).
std::vector<std::size_t> component_labels(const BinaryNetwork& net);

NetworkSummary summarize(const ValuedNetwork& net);

struct DemocracyChange {
  std::string node;
  double mean = 0.0;
  /// Last year minus first year; NaN when the node has a single year.
  double difference = 0.0;
  double last = 0.0;
  bool single_year = false;
};

/// Per-node time-frame mean and endpoint difference of libdem. Result is
/// sorted by descending mean (ties by node code).
std::vector<DemocracyChange> democracy_summary(const AttributePanel& panel,
                                               const std::string& variable = "libdem");

/// Table-1-shaped CSV: one row per statistic, one column per year.
void write_summary_table(std::ostream& out, const std::vector<NetworkSummary>& summaries);

/// node,mean,difference,last sorted by descending mean.
void write_democracy_csv(std::ostream& out, const std::vector<DemocracyChange>& rows);

}  // namespace collabnet
