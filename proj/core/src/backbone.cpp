#include "collabnet/backbone.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace collabnet {

double disparity_alpha(Weight w, std::uint64_t strength, std::size_t degree) {
  if (w == 0 || degree <= 1 || strength == 0) return 1.0;
  const double p = static_cast<double>(w) / static_cast<double>(strength);
  return std::pow(1.0 - p, static_cast<double>(degree - 1));
}

DisparityScores disparity_alpha(const ValuedNetwork& net) {
  const std::size_t n = net.size();
  std::vector<double> alpha(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t s = net.strength(i);
    const std::size_t k = net.degree(i);
    for (std::size_t j = 0; j < n; ++j) alpha[i * n + j] = disparity_alpha(net.weight(i, j), s, k);
  }
  return {n, std::move(alpha)};
}

BinaryNetwork extract_backbone(const ValuedNetwork& net, double level) {
  return extract_backbone(net, disparity_alpha(net), level);
}

BinaryNetwork extract_backbone(const ValuedNetwork& net, const DisparityScores& scores,
                               double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument(fmt::format("backbone level {} outside (0, 1)", level));
  }
  BinaryNetwork out(net.nodes(), net.year());
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j)
      if (net.weight(i, j) > 0 && scores.combined(i, j) < level) out.set_edge(i, j, true);
  return out;
}

std::vector<TrimLevel> trim_report(const ValuedNetwork& net, std::span<const double> levels) {
  if (levels.empty()) throw std::invalid_argument("trim report needs at least one level");
  const DisparityScores scores = disparity_alpha(net);
  const std::size_t total = net.edge_count();
  std::vector<TrimLevel> out;
  for (double level : levels) {
    TrimLevel row;
    row.level = level;
    row.edges_total = total;
    row.edges_retained = extract_backbone(net, scores, level).edge_count();
    row.fraction_removed =
        total == 0 ? 0.0
                   : 1.0 - static_cast<double>(row.edges_retained) / static_cast<double>(total);
    out.push_back(row);
  }
  return out;
}

void write_trim_report(std::ostream& out, int year, const std::vector<TrimLevel>& rows,
                       bool header) {
  if (header) out << "year,level,edges_total,edges_retained,fraction_removed\n";
  for (const auto& r : rows) {
    out << year << ',' << fmt::format("{}", r.level) << ',' << r.edges_total << ','
        << r.edges_retained << ',' << fmt::format("{:.6f}", r.fraction_removed) << '\n';
  }
}

}  // namespace collabnet
