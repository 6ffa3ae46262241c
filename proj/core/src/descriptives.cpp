#include "collabnet/descriptives.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace collabnet {

double density(const BinaryNetwork& net) {
  const std::size_t n = net.size();
  if (n < 2) throw std::invalid_argument("density needs at least 2 nodes");
  return static_cast<double>(net.edge_count()) / static_cast<double>(dyad_count(n));
}

double degree_centralization(const BinaryNetwork& net) {
  const std::size_t n = net.size();
  if (n < 3) throw std::invalid_argument("degree centralization needs at least 3 nodes");
  std::size_t d_max = 0;
  for (std::size_t i = 0; i < n; ++i) d_max = std::max(d_max, net.degree(i));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<double>(d_max - net.degree(i));
  return total / static_cast<double>((n - 1) * (n - 2));
}

std::uint64_t closed_triads(const BinaryNetwork& net) {
  const std::size_t n = net.size();
  if (n < 3) throw std::invalid_argument("closed triads need at least 3 nodes");
  // Each triangle i<j<k is counted once at its two smallest members by
  // masking the shared-neighbour bitset to indices above j.
  const std::size_t words = net.words_per_row();
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = net.row_bits(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!net.has_edge(i, j)) continue;
      const auto rj = net.row_bits(j);
      const std::size_t first_word = (j + 1) >> 6;
      for (std::size_t w = first_word; w < words; ++w) {
        std::uint64_t common = ri[w] & rj[w];
        if (w == first_word) {
          const std::size_t shift = (j + 1) & 63;
          common &= shift == 0 ? ~std::uint64_t{0} : (~std::uint64_t{0} << shift);
        }
        count += static_cast<std::uint64_t>(std::popcount(common));
      }
    }
  }
  return count;
}

std::uint64_t possible_triads(std::size_t n) {
  if (n < 3) throw std::invalid_argument("possible triads need at least 3 nodes");
  const auto m = static_cast<std::uint64_t>(n);
  return m * (m - 1) * (m - 2) / 6;
}

std::vector<std::size_t> component_labels(const BinaryNetwork& net) {
  const std::size_t n = net.size();
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, unset);
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : net.neighbors(u)) {
        if (label[v] == unset) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

ComponentCount components_and_isolates(const BinaryNetwork& net) {
  ComponentCount out;
  const auto labels = component_labels(net);
  out.components = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  for (std::size_t i = 0; i < net.size(); ++i) out.isolates += net.degree(i) == 0;
  return out;
}

NetworkSummary summarize(const ValuedNetwork& net) {
  NetworkSummary s;
  const BinaryNetwork bin = binarize(net, 1);
  s.year = net.year();
  s.nodes = net.size();
  s.total_edges = bin.edge_count();
  s.total_weight = net.total_weight();
  s.max_weight = net.max_weight();
  const auto cc = components_and_isolates(bin);
  s.components = cc.components;
  s.isolates = cc.isolates;
  s.density = s.nodes >= 2 ? density(bin) : 0.0;
  s.centralization = s.nodes >= 3 ? degree_centralization(bin) : 0.0;
  s.closed_triads = s.nodes >= 3 ? closed_triads(bin) : 0;
  return s;
}

std::vector<DemocracyChange> democracy_summary(const AttributePanel& panel,
                                               const std::string& variable) {
  std::vector<DemocracyChange> out;
  for (const auto& [node, by_year] : panel.rows()) {
    std::vector<std::pair<int, double>> values;
    for (const auto& [year, row] : by_year) {
      auto it = row.numeric.find(variable);
      if (it != row.numeric.end() && !std::isnan(it->second)) values.emplace_back(year, it->second);
    }
    if (values.empty()) continue;
    DemocracyChange c;
    c.node = node;
    double sum = 0.0;
    for (const auto& [_, v] : values) sum += v;
    c.mean = sum / static_cast<double>(values.size());
    c.last = values.back().second;
    c.single_year = values.size() < 2;
    c.difference = c.single_year ? kMissing : values.back().second - values.front().second;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const DemocracyChange& a, const DemocracyChange& b) {
    if (a.mean != b.mean) return a.mean > b.mean;
    return a.node < b.node;
  });
  return out;
}

void write_summary_table(std::ostream& out, const std::vector<NetworkSummary>& summaries) {
  out << "statistic";
  for (const auto& s : summaries) out << ',' << s.year;
  out << '\n';
  auto row = [&](const char* name, auto get) {
    out << name;
    for (const auto& s : summaries) out << ',' << get(s);
    out << '\n';
  };
  row("nodes", [](const NetworkSummary& s) { return std::to_string(s.nodes); });
  row("isolates", [](const NetworkSummary& s) { return std::to_string(s.isolates); });
  row("total edges", [](const NetworkSummary& s) { return std::to_string(s.total_edges); });
  row("total weight", [](const NetworkSummary& s) { return std::to_string(s.total_weight); });
  row("max weight", [](const NetworkSummary& s) { return std::to_string(s.max_weight); });
  row("components", [](const NetworkSummary& s) { return std::to_string(s.components); });
  row("density", [](const NetworkSummary& s) { return fmt::format("{:.3f}", s.density); });
  row("centralization",
      [](const NetworkSummary& s) { return fmt::format("{:.3f}", s.centralization); });
  row("closed triads", [](const NetworkSummary& s) { return std::to_string(s.closed_triads); });
}

void write_democracy_csv(std::ostream& out, const std::vector<DemocracyChange>& rows) {
  out << "node,mean,difference,last\n";
  for (const auto& r : rows) {
    out << r.node << ',' << fmt::format("{:.6f}", r.mean) << ','
        << (r.single_year ? std::string("NA") : fmt::format("{:.6f}", r.difference)) << ','
        << fmt::format("{:.6f}", r.last) << '\n';
  }
}

}  // namespace collabnet
