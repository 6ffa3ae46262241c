#include "collabnet/layout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "collabnet/rng.hpp"

namespace collabnet {

Layout layout_fr(const BinaryNetwork& net, std::uint64_t seed, const LayoutOptions& options) {
  const std::size_t n = net.size();
  if (n == 0) throw std::invalid_argument("layout needs at least one node");
  if (!(options.size > 0)) throw std::invalid_argument("layout frame size must be positive");

  Layout out;
  out.x.assign(n, 0.0);
  out.y.assign(n, 0.0);
  out.visible.assign(n, true);
  if (net.edge_count() > 0)
    for (std::size_t i = 0; i < n; ++i) out.visible[i] = net.degree(i) > 0;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i)
    if (out.visible[i]) active.push_back(i);

  const double half = options.size / 2.0;
  const double area = options.size * options.size;
  out.k = std::sqrt(area / static_cast<double>(active.size()));
  if (active.size() == 1) return out;

  Rng rng = make_rng(seed, 0);
  for (std::size_t i : active) {
    out.x[i] = (uniform01(rng) - 0.5) * options.size;
    out.y[i] = (uniform01(rng) - 0.5) * options.size;
  }

  const double k = out.k;
  const double k2 = k * k;
  const double t0 = options.size / 10.0;
  std::vector<double> dx(n), dy(n);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const double temperature =
        t0 * (1.0 - static_cast<double>(it) / static_cast<double>(options.iterations));
    std::fill(dx.begin(), dx.end(), 0.0);
    std::fill(dy.begin(), dy.end(), 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t i = active[a];
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const std::size_t j = active[b];
        double ex = out.x[i] - out.x[j];
        double ey = out.y[i] - out.y[j];
        double d = std::hypot(ex, ey);
        if (d < 1e-9) {
          // Coincident nodes: push apart along a fixed direction.
          ex = 1e-9 * (a < b ? 1.0 : -1.0);
          ey = 0.0;
          d = 1e-9;
        }
        double force = k2 / d;
        if (net.has_edge(i, j)) force -= d * d / k;
        const double fx = ex / d * force;
        const double fy = ey / d * force;
        dx[i] += fx;
        dy[i] += fy;
        dx[j] -= fx;
        dy[j] -= fy;
      }
    }
    for (std::size_t i : active) {
      const double len = std::hypot(dx[i], dy[i]);
      if (len > 0.0) {
        const double step = std::min(len, temperature);
        out.x[i] = std::clamp(out.x[i] + dx[i] / len * step, -half, half);
        out.y[i] = std::clamp(out.y[i] + dy[i] / len * step, -half, half);
      }
    }
  }
  return out;
}

}  // namespace collabnet
