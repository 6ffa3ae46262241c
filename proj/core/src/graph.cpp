#include "collabnet/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace collabnet {

namespace {

void check_pair(std::size_t n, std::size_t i, std::size_t j) {
  if (i >= n || j >= n) {
    throw std::out_of_range("node index out of range: (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") for n=" + std::to_string(n));
  }
  if (i == j) throw std::invalid_argument("self-loop at node " + std::to_string(i));
}

void check_index(std::size_t n, std::size_t i) {
  if (i >= n) {
    throw std::out_of_range("node index " + std::to_string(i) + " out of range for n=" +
                            std::to_string(n));
  }
}

}  // namespace

NodeList numbered_nodes(std::size_t n) {
  NodeList nodes;
  nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(std::to_string(i));
  return nodes;
}

// ValuedNetwork

ValuedNetwork::ValuedNetwork(NodeList nodes, int year)
    : nodes_(std::move(nodes)), weights_(nodes_.size() * nodes_.size(), 0), year_(year) {}

void ValuedNetwork::set_weight(std::size_t i, std::size_t j, Weight w) {
  check_pair(size(), i, j);
  weights_[i * size() + j] = w;
  weights_[j * size() + i] = w;
}

void ValuedNetwork::add_weight(std::size_t i, std::size_t j, Weight w) {
  check_pair(size(), i, j);
  set_weight(i, j, weight(i, j) + w);
}

std::uint64_t ValuedNetwork::strength(std::size_t i) const {
  check_index(size(), i);
  std::uint64_t s = 0;
  for (Weight w : row(i)) s += w;
  return s;
}

std::size_t ValuedNetwork::degree(std::size_t i) const {
  check_index(size(), i);
  return static_cast<std::size_t>(std::count_if(row(i).begin(), row(i).end(),
                                                [](Weight w) { return w > 0; }));
}

std::size_t ValuedNetwork::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) count += weight(i, j) > 0;
  return count;
}

std::uint64_t ValuedNetwork::total_weight() const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) total += weight(i, j);
  return total;
}

Weight ValuedNetwork::max_weight() const {
  return weights_.empty() ? 0 : *std::max_element(weights_.begin(), weights_.end());
}

std::optional<std::size_t> ValuedNetwork::index_of(const std::string& node) const {
  auto it = std::find(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

// BinaryNetwork

BinaryNetwork::BinaryNetwork(std::size_t n) : BinaryNetwork(numbered_nodes(n)) {}

BinaryNetwork::BinaryNetwork(NodeList nodes, int year)
    : nodes_(std::move(nodes)),
      words_((nodes_.size() + 63) / 64),
      bits_(nodes_.size() * words_, 0),
      degrees_(nodes_.size(), 0),
      year_(year) {}

void BinaryNetwork::set_edge(std::size_t i, std::size_t j, bool present) {
  check_pair(size(), i, j);
  if (has_edge(i, j) == present) return;
  const std::uint64_t mask_j = std::uint64_t{1} << (j & 63);
  const std::uint64_t mask_i = std::uint64_t{1} << (i & 63);
  bits_[i * words_ + (j >> 6)] ^= mask_j;
  bits_[j * words_ + (i >> 6)] ^= mask_i;
  if (present) {
    ++degrees_[i];
    ++degrees_[j];
    ++edges_;
  } else {
    --degrees_[i];
    --degrees_[j];
    --edges_;
  }
}

std::size_t BinaryNetwork::shared_partners(std::size_t i, std::size_t j) const noexcept {
  const std::uint64_t* a = bits_.data() + i * words_;
  const std::uint64_t* b = bits_.data() + j * words_;
  std::size_t count = 0;
  for (std::size_t w = 0; w < words_; ++w) count += std::popcount(a[w] & b[w]);
  return count;
}

std::vector<std::size_t> BinaryNetwork::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  out.reserve(degrees_[i]);
  for (std::size_t w = 0; w < words_; ++w) {
    std::uint64_t word = bits_[i * words_ + w];
    while (word) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
  return out;
}

// Construction

ValuedNetwork build_network(std::size_t n, std::span<const EdgeInput> edges) {
  return build_network(numbered_nodes(n), edges);
}

ValuedNetwork build_network(NodeList nodes, std::span<const EdgeInput> edges, int year) {
  ValuedNetwork net(std::move(nodes), year);
  for (const auto& e : edges) {
    check_pair(net.size(), e.i, e.j);
    if (e.weight < 0) {
      throw std::invalid_argument("negative weight " + std::to_string(e.weight) + " on (" +
                                  std::to_string(e.i) + ", " + std::to_string(e.j) + ")");
    }
    net.add_weight(e.i, e.j, static_cast<Weight>(e.weight));
  }
  return net;
}

BinaryNetwork binarize(const ValuedNetwork& net, Weight threshold) {
  if (threshold < 1) throw std::invalid_argument("binarize threshold must be >= 1");
  BinaryNetwork out(net.nodes(), net.year());
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j)
      if (net.weight(i, j) >= threshold) out.set_edge(i, j, true);
  return out;
}

ValuedNetwork to_valued(const BinaryNetwork& net) {
  ValuedNetwork out(net.nodes(), net.year());
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j)
      if (net.has_edge(i, j)) out.set_weight(i, j, 1);
  return out;
}

std::size_t degree(const BinaryNetwork& net, std::size_t i) {
  check_index(net.size(), i);
  return net.degree(i);
}

std::uint64_t strength(const ValuedNetwork& net, std::size_t i) { return net.strength(i); }

// AttributePanel

bool AttributePanel::Row::operator==(const Row& other) const {
  if (categorical != other.categorical || numeric.size() != other.numeric.size()) return false;
  return std::equal(numeric.begin(), numeric.end(), other.numeric.begin(),
                    [](const auto& a, const auto& b) {
                      return a.first == b.first &&
                             (a.second == b.second || (std::isnan(a.second) && std::isnan(b.second)));
                    });
}

void AttributePanel::set_numeric(const std::string& node, int year, const std::string& variable,
                                 double value) {
  rows_[node][year].numeric[variable] = value;
}

void AttributePanel::set_categorical(const std::string& node, int year,
                                     const std::string& variable, std::string value) {
  rows_[node][year].categorical[variable] = std::move(value);
}

double AttributePanel::numeric(const std::string& node, int year,
                               const std::string& variable) const {
  auto n = rows_.find(node);
  if (n == rows_.end()) return kMissing;
  auto y = n->second.find(year);
  if (y == n->second.end()) return kMissing;
  auto v = y->second.numeric.find(variable);
  return v == y->second.numeric.end() ? kMissing : v->second;
}

std::optional<std::string> AttributePanel::categorical(const std::string& node, int year,
                                                       const std::string& variable) const {
  auto n = rows_.find(node);
  if (n == rows_.end()) return std::nullopt;
  auto y = n->second.find(year);
  if (y == n->second.end()) return std::nullopt;
  auto v = y->second.categorical.find(variable);
  if (v == y->second.categorical.end() || v->second.empty()) return std::nullopt;
  return v->second;
}

bool AttributePanel::has_row(const std::string& node, int year) const {
  auto n = rows_.find(node);
  return n != rows_.end() && n->second.count(year) > 0;
}

bool AttributePanel::complete(const std::string& node, int year,
                              std::span<const std::string> variables) const {
  if (!has_row(node, year)) return false;
  const Row& row = rows_.at(node).at(year);
  for (const auto& v : variables) {
    if (auto it = row.numeric.find(v); it != row.numeric.end()) {
      if (std::isnan(it->second)) return false;
    } else if (auto c = row.categorical.find(v); c != row.categorical.end()) {
      if (c->second.empty()) return false;
    } else {
      return false;
    }
  }
  return true;
}

NodeList AttributePanel::nodes() const {
  NodeList out;
  for (const auto& [node, _] : rows_) out.push_back(node);
  return out;
}

std::vector<int> AttributePanel::years() const {
  std::set<int> years;
  for (const auto& [_, by_year] : rows_)
    for (const auto& [year, __] : by_year) years.insert(year);
  return {years.begin(), years.end()};
}

std::vector<std::string> AttributePanel::numeric_variables() const {
  std::set<std::string> names;
  for (const auto& [_, by_year] : rows_)
    for (const auto& [__, row] : by_year)
      for (const auto& [name, ___] : row.numeric) names.insert(name);
  return {names.begin(), names.end()};
}

std::vector<std::string> AttributePanel::categorical_variables() const {
  std::set<std::string> names;
  for (const auto& [_, by_year] : rows_)
    for (const auto& [__, row] : by_year)
      for (const auto& [name, ___] : row.categorical) names.insert(name);
  return {names.begin(), names.end()};
}

NodeAttributes AttributePanel::snapshot(const NodeList& nodes, int year) const {
  NodeAttributes out;
  out.nodes = nodes;
  const auto numeric_names = numeric_variables();
  const auto categorical_names = categorical_variables();
  for (const auto& name : numeric_names) out.numeric[name].reserve(nodes.size());
  for (const auto& name : categorical_names) out.categorical[name].reserve(nodes.size());
  for (const auto& node : nodes) {
    if (!has_row(node, year)) {
      throw std::invalid_argument("no attribute row for node " + node + " in " +
                                  std::to_string(year));
    }
    for (const auto& name : numeric_names) out.numeric[name].push_back(numeric(node, year, name));
    for (const auto& name : categorical_names)
      out.categorical[name].push_back(categorical(node, year, name).value_or(""));
  }
  return out;
}

// EdgeCovariateMatrix

EdgeCovariateMatrix::EdgeCovariateMatrix(NodeList nodes, std::vector<double> values,
                                         std::string label)
    : nodes_(std::move(nodes)), values_(std::move(values)), label_(std::move(label)) {
  const std::size_t n = nodes_.size();
  if (values_.size() != n * n) {
    throw std::invalid_argument("edge covariate '" + label_ + "' has " +
                                std::to_string(values_.size()) + " entries, expected " +
                                std::to_string(n * n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = values_[i * n + j];
      if (!std::isfinite(v)) {
        throw std::invalid_argument("edge covariate '" + label_ + "' has a non-finite entry at (" +
                                    nodes_[i] + ", " + nodes_[j] + ")");
      }
      if (v != values_[j * n + i]) {
        throw std::invalid_argument("edge covariate '" + label_ + "' is not symmetric at (" +
                                    nodes_[i] + ", " + nodes_[j] + ")");
      }
    }
  }
}

EdgeCovariateMatrix EdgeCovariateMatrix::constant(NodeList nodes, double value,
                                                  std::string label) {
  const std::size_t n = nodes.size();
  std::vector<double> values(n * n, value);
  for (std::size_t i = 0; i < n; ++i) values[i * n + i] = 0.0;
  return {std::move(nodes), std::move(values), std::move(label)};
}

EdgeCovariateMatrix EdgeCovariateMatrix::from_network(const BinaryNetwork& net,
                                                      std::string label) {
  const std::size_t n = net.size();
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && net.has_edge(i, j)) values[i * n + j] = 1.0;
  return {net.nodes(), std::move(values), std::move(label)};
}

// NetworkSeries

NetworkSeries::NetworkSeries(std::vector<ValuedNetwork> networks) : networks_(std::move(networks)) {
  for (std::size_t t = 1; t < networks_.size(); ++t) {
    if (networks_[t].nodes() != networks_[0].nodes()) {
      throw std::invalid_argument("network for year " + std::to_string(networks_[t].year()) +
                                  " does not share the series node ordering");
    }
    if (networks_[t].year() <= networks_[t - 1].year()) {
      throw std::invalid_argument("series years must be strictly increasing");
    }
  }
}

const NodeList& NetworkSeries::nodes() const {
  if (networks_.empty()) throw std::logic_error("empty network series has no node list");
  return networks_.front().nodes();
}

std::vector<int> NetworkSeries::years() const {
  std::vector<int> out;
  for (const auto& net : networks_) out.push_back(net.year());
  return out;
}

ValuedNetwork reindex(const ValuedNetwork& net, const NodeList& nodes) {
  ValuedNetwork out(nodes, net.year());
  std::vector<std::optional<std::size_t>> source(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) source[i] = net.index_of(nodes[i]);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!source[i]) continue;
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (!source[j]) continue;
      const Weight w = net.weight(*source[i], *source[j]);
      if (w > 0) out.set_weight(i, j, w);
    }
  }
  return out;
}

NetworkSeries align_node_sets(const std::vector<ValuedNetwork>& raw, const AttributePanel& panel,
                              int reference_year, std::span<const std::string> required) {
  auto ref = std::find_if(raw.begin(), raw.end(),
                          [&](const ValuedNetwork& n) { return n.year() == reference_year; });
  if (ref == raw.end()) {
    throw std::invalid_argument("reference year " + std::to_string(reference_year) +
                                " not present in the series");
  }
  NodeList kept;
  for (const auto& node : ref->nodes()) {
    const bool ok = std::all_of(raw.begin(), raw.end(), [&](const ValuedNetwork& n) {
      return panel.complete(node, n.year(), required);
    });
    if (ok) kept.push_back(node);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.empty()) {
    throw std::invalid_argument("node alignment left no nodes: reference node set and attribute "
                                "panel do not intersect");
  }
  std::vector<ValuedNetwork> aligned;
  aligned.reserve(raw.size());
  for (const auto& net : raw) aligned.push_back(reindex(net, kept));
  std::sort(aligned.begin(), aligned.end(),
            [](const ValuedNetwork& a, const ValuedNetwork& b) { return a.year() < b.year(); });
  return NetworkSeries(std::move(aligned));
}

}  // namespace collabnet
