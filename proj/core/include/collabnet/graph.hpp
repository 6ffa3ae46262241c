#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace collabnet {

using NodeList = std::vector<std::string>;

/// Co-publication count, or a quantized level 0..m.
using Weight = std::uint32_t;

/// Placeholder node ids "0", "1", ... for networks built from a bare count.
NodeList numbered_nodes(std::size_t n);

/// Number of unordered node pairs.
constexpr std::size_t dyad_count(std::size_t n) noexcept { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Undirected network with non-negative integer tie weights. The weight
/// matrix is dense and kept symmetric with a zero diagonal.
class ValuedNetwork {
 public:
  ValuedNetwork() = default;
  explicit ValuedNetwork(NodeList nodes, int year = 0);

  std::size_t size() const noexcept { return nodes_.size(); }
  const NodeList& nodes() const noexcept { return nodes_; }
  int year() const noexcept { return year_; }
  void set_year(int year) noexcept { year_ = year; }

  Weight weight(std::size_t i, std::size_t j) const noexcept { return weights_[i * size() + j]; }
  std::span<const Weight> row(std::size_t i) const noexcept {
    return {weights_.data() + i * size(), size()};
  }

  /// Sets both (i,j) and (j,i). Throws on i == j or out-of-range indices.
  void set_weight(std::size_t i, std::size_t j, Weight w);
  void add_weight(std::size_t i, std::size_t j, Weight w);

  std::uint64_t strength(std::size_t i) const;
  std::size_t degree(std::size_t i) const;
  std::size_t edge_count() const;
  std::uint64_t total_weight() const;
  Weight max_weight() const;

  std::optional<std::size_t> index_of(const std::string& node) const;

  bool operator==(const ValuedNetwork&) const = default;

 private:
  NodeList nodes_;
  std::vector<Weight> weights_;
  int year_ = 0;
};

/// Undirected simple graph. Rows are stored as bitsets so shared-partner
/// counts reduce to popcounts; degrees and the edge count are cached.
class BinaryNetwork {
 public:
  BinaryNetwork() = default;
  explicit BinaryNetwork(std::size_t n);
  explicit BinaryNetwork(NodeList nodes, int year = 0);

  std::size_t size() const noexcept { return nodes_.size(); }
  const NodeList& nodes() const noexcept { return nodes_; }
  int year() const noexcept { return year_; }
  void set_year(int year) noexcept { year_ = year; }

  bool has_edge(std::size_t i, std::size_t j) const noexcept {
    return (bits_[i * words_ + (j >> 6)] >> (j & 63)) & 1U;
  }
  void set_edge(std::size_t i, std::size_t j, bool present);
  void toggle(std::size_t i, std::size_t j) { set_edge(i, j, !has_edge(i, j)); }

  std::size_t degree(std::size_t i) const noexcept { return degrees_[i]; }
  std::size_t edge_count() const noexcept { return edges_; }

  /// Number of nodes adjacent to both i and j.
  std::size_t shared_partners(std::size_t i, std::size_t j) const noexcept;

  std::vector<std::size_t> neighbors(std::size_t i) const;

  std::span<const std::uint64_t> row_bits(std::size_t i) const noexcept {
    return {bits_.data() + i * words_, words_};
  }
  std::size_t words_per_row() const noexcept { return words_; }

  bool operator==(const BinaryNetwork& other) const {
    return nodes_ == other.nodes_ && bits_ == other.bits_;
  }

 private:
  NodeList nodes_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> degrees_;
  std::size_t edges_ = 0;
  int year_ = 0;
};

struct EdgeInput {
  std::size_t i = 0;
  std::size_t j = 0;
  std::int64_t weight = 0;
};

/// Builds a symmetric network; repeated pairs are summed. Rejects
/// self-loops, negative weights and out-of-range endpoints.
ValuedNetwork build_network(std::size_t n, std::span<const EdgeInput> edges);
ValuedNetwork build_network(NodeList nodes, std::span<const EdgeInput> edges, int year = 0);

/// adjacency(i,j) = weight(i,j) >= threshold. threshold must be >= 1.
BinaryNetwork binarize(const ValuedNetwork& net, Weight threshold = 1);

/// Converts a 0/1-valued network back to the binary representation.
ValuedNetwork to_valued(const BinaryNetwork& net);

std::size_t degree(const BinaryNetwork& net, std::size_t i);
std::uint64_t strength(const ValuedNetwork& net, std::size_t i);

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Attribute values of one network's nodes for one year, aligned to the
/// network's node order.
struct NodeAttributes {
  NodeList nodes;
  std::map<std::string, std::vector<double>> numeric;
  std::map<std::string, std::vector<std::string>> categorical;
};

/// Per-node, per-year covariates. Numeric cells that are absent or NaN
/// count as missing.
class AttributePanel {
 public:
  struct Row {
    std::map<std::string, double> numeric;
    std::map<std::string, std::string> categorical;

    /// Missing (NaN) cells compare equal to each other.
    bool operator==(const Row& other) const;
  };

  void set_numeric(const std::string& node, int year, const std::string& variable, double value);
  void set_categorical(const std::string& node, int year, const std::string& variable,
                       std::string value);

  /// NaN when the node-year row or the variable is absent.
  double numeric(const std::string& node, int year, const std::string& variable) const;
  std::optional<std::string> categorical(const std::string& node, int year,
                                         const std::string& variable) const;

  bool has_row(const std::string& node, int year) const;
  /// True when every listed variable is present (non-NaN numeric or
  /// non-empty categorical) for the node-year.
  bool complete(const std::string& node, int year, std::span<const std::string> variables) const;

  NodeList nodes() const;
  std::vector<int> years() const;
  std::vector<std::string> numeric_variables() const;
  std::vector<std::string> categorical_variables() const;

  /// Attribute columns for `nodes` in `year`. Throws if a node has no row.
  NodeAttributes snapshot(const NodeList& nodes, int year) const;

  const std::map<std::string, std::map<int, Row>>& rows() const noexcept { return rows_; }

  bool operator==(const AttributePanel&) const = default;

 private:
  std::map<std::string, std::map<int, Row>> rows_;
};

/// Symmetric dyadic covariate with finite entries (distance, lagged
/// network, time index).
class EdgeCovariateMatrix {
 public:
  EdgeCovariateMatrix() = default;
  EdgeCovariateMatrix(NodeList nodes, std::vector<double> values, std::string label);

  /// Matrix with every off-diagonal entry equal to `value`.
  static EdgeCovariateMatrix constant(NodeList nodes, double value, std::string label);
  static EdgeCovariateMatrix from_network(const BinaryNetwork& net, std::string label);

  std::size_t size() const noexcept { return nodes_.size(); }
  const NodeList& nodes() const noexcept { return nodes_; }
  const std::string& label() const noexcept { return label_; }
  double at(std::size_t i, std::size_t j) const noexcept { return values_[i * size() + j]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  NodeList nodes_;
  std::vector<double> values_;
  std::string label_;
};

/// Yearly networks over one shared node list with strictly increasing years.
class NetworkSeries {
 public:
  NetworkSeries() = default;
  explicit NetworkSeries(std::vector<ValuedNetwork> networks);

  std::size_t length() const noexcept { return networks_.size(); }
  const NodeList& nodes() const;
  const std::vector<ValuedNetwork>& networks() const noexcept { return networks_; }
  const ValuedNetwork& operator[](std::size_t t) const { return networks_.at(t); }
  std::vector<int> years() const;

 private:
  std::vector<ValuedNetwork> networks_;
};

/// Variables a node must have to stay in the analyzed node set.
inline const std::vector<std::string> kRequiredAttributes{"libdem"};

/// Reindexes every yearly network onto the reference year's node list,
/// restricted to nodes whose `required` attributes are complete in every
/// year. Nodes missing from a year become isolates there. Output nodes are
/// sorted.
NetworkSeries align_node_sets(const std::vector<ValuedNetwork>& raw, const AttributePanel& panel,
                              int reference_year,
                              std::span<const std::string> required = kRequiredAttributes);

/// Copies the pairs among `nodes` out of `net` (nodes absent in `net`
/// become isolates).
ValuedNetwork reindex(const ValuedNetwork& net, const NodeList& nodes);

}  // namespace collabnet
