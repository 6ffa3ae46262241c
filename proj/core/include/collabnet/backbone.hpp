#pragma once

#include <algorithm>
#include <iosfwd>
#include <span>
#include <vector>

#include "collabnet/graph.hpp"

namespace collabnet {

/// Disparity-filter significance of each tie seen from each endpoint.
/// alpha(i, j) is the probability, under uniform random splitting of i's
/// strength across its k_i ties, of a share at least w_ij / s_i. The matrix
/// is not symmetric; entries are 1 where the weight is zero.
class DisparityScores {
 public:
  DisparityScores() = default;
  DisparityScores(std::size_t n, std::vector<double> alpha) : n_(n), alpha_(std::move(alpha)) {}

  std::size_t size() const noexcept { return n_; }
  double at(std::size_t i, std::size_t j) const noexcept { return alpha_[i * n_ + j]; }
  /// min(alpha(i,j), alpha(j,i)): significance from the more favourable end.
  double combined(std::size_t i, std::size_t j) const noexcept {
    return std::min(at(i, j), at(j, i));
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> alpha_;
};

/// (1 - w/s)^(k - 1) for a tie of weight w at an endpoint with strength s
/// and degree k; 1 when k <= 1.
double disparity_alpha(Weight w, std::uint64_t strength, std::size_t degree);

DisparityScores disparity_alpha(const ValuedNetwork& net);

/// Keeps tie {i,j} iff min(alpha(i,j), alpha(j,i)) < level. Zero-weight
/// dyads are never kept. level must lie in (0, 1).
BinaryNetwork extract_backbone(const ValuedNetwork& net, double level);
BinaryNetwork extract_backbone(const ValuedNetwork& net, const DisparityScores& scores,
                               double level);

struct TrimLevel {
  double level = 0.0;
  std::size_t edges_retained = 0;
  std::size_t edges_total = 0;
  double fraction_removed = 0.0;
};

std::vector<TrimLevel> trim_report(const ValuedNetwork& net, std::span<const double> levels);

/// year,level,edges_total,edges_retained,fraction_removed
void write_trim_report(std::ostream& out, int year, const std::vector<TrimLevel>& rows,
                       bool header = true);

}  // namespace collabnet
