#pragma once

#include <cstdint>
#include <vector>

#include "collabnet/graph.hpp"

namespace collabnet {

struct Layout {
  std::vector<double> x;
  std::vector<double> y;
  /// False for isolates, which are left at the origin and not drawn. When
  /// the graph has no ties at all every node is laid out and visible.
  std::vector<bool> visible;
  /// Ideal edge length sqrt(area / visible nodes).
  double k = 0.0;
};

struct LayoutOptions {
  std::size_t iterations = 500;
  /// Side of the square frame centred on the origin.
  double size = 1.0;
};

/// Fruchterman-Reingold: repulsion k^2/d between all visible pairs,
/// attraction d^2/k along ties, displacement capped by a temperature that
/// cools linearly from size/10 to 0. Initial positions are uniform in the
/// frame from `seed`.
Layout layout_fr(const BinaryNetwork& net, std::uint64_t seed, const LayoutOptions& options = {});

}  // namespace collabnet
