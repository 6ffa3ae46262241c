#pragma once

// Brute-force reference implementations used by the tests. Everything here
// is written straight from the definitions, with no incremental tricks and
// no code shared with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "collabnet/graph.hpp"
#include "collabnet/terms.hpp"

namespace oracle {

using namespace collabnet;

using Dense = std::vector<std::vector<double>>;

inline Dense dense(const BinaryNetwork& net) {
  Dense y(net.size(), std::vector<double>(net.size(), 0.0));
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = 0; j < net.size(); ++j) y[i][j] = net.has_edge(i, j) ? 1.0 : 0.0;
  return y;
}

inline Dense dense(const ValuedNetwork& net) {
  Dense y(net.size(), std::vector<double>(net.size(), 0.0));
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = 0; j < net.size(); ++j) y[i][j] = net.weight(i, j);
  return y;
}

inline std::size_t degree_of(const Dense& y, std::size_t i) {
  std::size_t d = 0;
  for (std::size_t j = 0; j < y.size(); ++j) d += y[i][j] > 0;
  return d;
}

inline std::size_t shared_of(const Dense& y, std::size_t i, std::size_t j) {
  std::size_t s = 0;
  for (std::size_t k = 0; k < y.size(); ++k)
    if (k != i && k != j && y[i][k] > 0 && y[j][k] > 0) ++s;
  return s;
}

/// Levels a nodefactor term reports: all levels but the reference, sorted.
inline std::vector<std::string> factor_levels(const TermSpec& t,
                                              const std::vector<std::string>& values) {
  std::map<std::string, int> counts;
  for (const auto& v : values) ++counts[v];
  std::string ref;
  if (t.reference_level) {
    ref = *t.reference_level;
  } else {
    int best = -1;
    for (const auto& [level, c] : counts)
      if (c > best) best = c, ref = level;
  }
  std::vector<std::string> out;
  for (const auto& [level, c] : counts)
    if (level != ref) out.push_back(level);
  return out;
}

/// g(y) evaluated term by term from the textbook formulas. Returned as
/// label -> value so callers can match against the model's ordering.
inline std::map<std::string, double> statistics(const ModelSpec& spec, const ModelData& data,
                                                const Dense& y) {
  const std::size_t n = y.size();
  std::map<std::string, double> out;
  auto pairs = [&](auto&& f) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += y[i][j] * f(i, j);
    return s;
  };
  for (const auto& t : spec.terms) {
    switch (t.kind) {
      case TermKind::edges:
        out["edges"] = pairs([](auto, auto) { return 1.0; });
        break;
      case TermKind::sum:
        out["sum"] = pairs([](auto, auto) { return 1.0; });
        break;
      case TermKind::nonzero: {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) s += y[i][j] > 0;
        out["nonzero"] = s;
        break;
      }
      case TermKind::nodecov: {
        const auto& x = data.attributes.numeric.at(t.attribute);
        out["nodecov." + t.attribute] = pairs([&](auto i, auto j) { return x[i] + x[j]; });
        break;
      }
      case TermKind::absdiff: {
        const auto& x = data.attributes.numeric.at(t.attribute);
        out["absdiff." + t.attribute] =
            pairs([&](auto i, auto j) { return std::abs(x[i] - x[j]); });
        break;
      }
      case TermKind::nodematch: {
        const auto& c = data.attributes.categorical.at(t.attribute);
        out["nodematch." + t.attribute] = pairs([&](auto i, auto j) { return c[i] == c[j] ? 1.0 : 0.0; });
        break;
      }
      case TermKind::nodefactor: {
        const auto& c = data.attributes.categorical.at(t.attribute);
        for (const auto& level : factor_levels(t, c)) {
          out["nodefactor." + t.attribute + "." + level] = pairs([&](auto i, auto j) {
            return (c[i] == level ? 1.0 : 0.0) + (c[j] == level ? 1.0 : 0.0);
          });
        }
        break;
      }
      case TermKind::edgecov: {
        const auto& m = data.covariates.at(t.covariate);
        out["edgecov." + t.covariate] = pairs([&](auto i, auto j) { return m.at(i, j); });
        break;
      }
      case TermKind::memory_lag:
        out["memory"] = pairs([&](auto i, auto j) { return data.lag->at(i, j); });
        break;
      case TermKind::time_trend:
        out["timetrend"] = pairs([&](auto, auto) { return double(data.time_index); });
        break;
      case TermKind::gwdegree: {
        std::vector<double> D(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) D[degree_of(y, i)] += 1;
        double s = 0;
        for (std::size_t k = 1; k < n; ++k)
          s += (1 - std::pow(1 - std::exp(-t.decay), double(k))) * D[k];
        out[fmt::format("gwdegree.{}", t.decay)] = std::exp(t.decay) * s;
        break;
      }
      case TermKind::gwesp: {
        std::vector<double> EP(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j)
            if (y[i][j] > 0) EP[shared_of(y, i, j)] += 1;
        double s = 0;
        for (std::size_t k = 1; k + 2 <= n; ++k)
          s += (1 - std::pow(1 - std::exp(-t.decay), double(k))) * EP[k];
        out[fmt::format("gwesp.{}", t.decay)] = std::exp(t.decay) * s;
        break;
      }
      case TermKind::nodesqrtcovar: {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
              if (j != i && k != i) s += std::sqrt(y[i][j] * y[i][k]);
        out["nodesqrtcovar"] = s;
        break;
      }
      case TermKind::transitiveweights: {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) {
            double best = 0;
            for (std::size_t k = 0; k < n; ++k)
              if (k != i && k != j) best = std::max(best, std::min(y[i][k], y[k][j]));
            s += std::min(y[i][j], best);
          }
        out["transitiveweights"] = s;
        break;
      }
    }
  }
  return out;
}

/// Oracle statistics laid out in the model's label order.
inline std::vector<double> ordered(const Model& model, const std::map<std::string, double>& stats) {
  std::vector<double> out;
  for (const auto& label : model.labels()) out.push_back(stats.at(label));
  return out;
}

inline std::vector<double> statistics(const Model& model, const ModelData& data, const Dense& y) {
  return ordered(model, statistics(model.spec(), data, y));
}

/// Every state of a tiny network with its statistic vector, for exact
/// likelihood work. Binary when max_value == 1.
struct StateSpace {
  std::vector<Dense> states;
  std::vector<Eigen::VectorXd> stats;
  std::vector<double> log_base;  // log prod C(m, y_ij)
};

inline StateSpace enumerate(const Model& model, const ModelData& data, std::size_t n,
                            Weight m) {
  std::vector<std::pair<std::size_t, std::size_t>> dyads;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dyads.emplace_back(i, j);
  std::uint64_t total = 1;
  for (std::size_t d = 0; d < dyads.size(); ++d) total *= (m + 1);
  StateSpace space;
  for (std::uint64_t code = 0; code < total; ++code) {
    Dense y(n, std::vector<double>(n, 0.0));
    std::uint64_t c = code;
    double lb = 0;
    for (auto [i, j] : dyads) {
      const auto v = static_cast<double>(c % (m + 1));
      c /= (m + 1);
      y[i][j] = y[j][i] = v;
      lb += std::lgamma(m + 1.0) - std::lgamma(v + 1.0) - std::lgamma(m - v + 1.0);
    }
    const auto s = statistics(model, data, y);
    space.stats.push_back(Eigen::Map<const Eigen::VectorXd>(s.data(), Eigen::Index(s.size())));
    space.log_base.push_back(lb);
    space.states.push_back(std::move(y));
  }
  return space;
}

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double log_z = 0;
};

inline Moments moments(const StateSpace& space, const Eigen::VectorXd& theta) {
  std::vector<double> logw(space.stats.size());
  double top = -INFINITY;
  for (std::size_t s = 0; s < logw.size(); ++s) {
    logw[s] = space.log_base[s] + theta.dot(space.stats[s]);
    top = std::max(top, logw[s]);
  }
  const auto p = theta.size();
  Moments out{Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p), 0};
  double z = 0;
  for (std::size_t s = 0; s < logw.size(); ++s) {
    const double w = std::exp(logw[s] - top);
    z += w;
    out.mean += w * space.stats[s];
    out.cov += w * space.stats[s] * space.stats[s].transpose();
  }
  out.mean /= z;
  out.cov = out.cov / z - out.mean * out.mean.transpose();
  out.log_z = top + std::log(z);
  return out;
}

inline double log_likelihood(const StateSpace& space, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& observed) {
  return theta.dot(observed) - moments(space, theta).log_z;
}

/// Exact MLE by plain Newton on the enumerated likelihood.
inline Eigen::VectorXd exact_mle(const StateSpace& space, const Eigen::VectorXd& observed,
                                 std::size_t iterations = 200) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(observed.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    const Moments m = moments(space, theta);
    const Eigen::VectorXd grad = observed - m.mean;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-11) break;
    Eigen::VectorXd step = m.cov.ldlt().solve(grad);
    double scale = 1.0;
    const double base = log_likelihood(space, theta, observed);
    while (scale > 1e-6 && log_likelihood(space, theta + scale * step, observed) < base) scale /= 2;
    theta += scale * step;
  }
  return theta;
}

/// Coordinate-free grid search: a shrinking grid centred on the running
/// best point. Slow and simple on purpose.
template <typename F>
Eigen::VectorXd grid_maximize(F&& f, Eigen::VectorXd centre, double radius, int points = 21,
                              int rounds = 14) {
  const auto p = centre.size();
  for (int r = 0; r < rounds; ++r) {
    Eigen::VectorXd best = centre;
    double best_value = f(centre);
    std::vector<int> idx(static_cast<std::size_t>(p), 0);
    for (;;) {
      Eigen::VectorXd x(p);
      for (Eigen::Index k = 0; k < p; ++k)
        x[k] = centre[k] + radius * (2.0 * idx[static_cast<std::size_t>(k)] / (points - 1) - 1.0);
      const double v = f(x);
      if (v > best_value) best_value = v, best = x;
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == points) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    centre = best;
    radius *= 0.35;
  }
  return centre;
}

/// Weighted logistic log-likelihood of a dyad design.
inline double logistic_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& theta) {
  double s = 0;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const double eta = X.row(r).dot(theta);
    s += y[r] * eta - std::log1p(std::exp(eta));
  }
  return s;
}

// Descriptives

inline std::uint64_t triangles(const BinaryNetwork& net) {
  std::uint64_t t = 0;
  const auto n = net.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        t += net.has_edge(a, b) && net.has_edge(b, c) && net.has_edge(a, c);
  return t;
}

inline std::size_t components(const BinaryNetwork& net) {
  std::vector<std::size_t> parent(net.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j)
      if (net.has_edge(i, j)) parent[find(i)] = find(j);
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < net.size(); ++i) roots.insert(find(i));
  return roots.size();
}

/// Degree, ESP and geodesic histograms; geodesics by Floyd-Warshall with
/// the unreachable count in the final slot.
struct Histograms {
  std::vector<double> degree, esp, geodesic;
};

inline Histograms histograms(const BinaryNetwork& net) {
  const auto n = net.size();
  Histograms h{std::vector<double>(n, 0.0), std::vector<double>(n >= 2 ? n - 1 : 1, 0.0),
               std::vector<double>(n, 0.0)};
  const Dense y = dense(net);
  for (std::size_t i = 0; i < n; ++i) h.degree[degree_of(y, i)] += 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (y[i][j] > 0) h.esp[shared_of(y, i, j)] += 1;
  const std::size_t far = n + 1;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, far));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (y[i][j] > 0) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[i][j] >= far) {
        h.geodesic[n - 1] += 1;
      } else {
        h.geodesic[d[i][j] - 1] += 1;
      }
    }
  return h;
}

/// Monte-Carlo disparity null: an edge's share of a node's strength under
/// k - 1 uniform break points is the first spacing, i.e. the smallest
/// break point. Returns the fraction of draws at least `share`.
inline double disparity_monte_carlo(std::size_t k, double share, std::size_t draws,
                                    std::mt19937_64& rng) {
  if (k <= 1) return 1.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t hits = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    double first = 1.0;
    for (std::size_t b = 0; b + 1 < k; ++b) first = std::min(first, u(rng));
    hits += first >= share;
  }
  return double(hits) / double(draws);
}

// Random fixtures

inline BinaryNetwork random_binary(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution b(p);
  BinaryNetwork net(numbered_nodes(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (b(rng)) net.set_edge(i, j, true);
  return net;
}

inline ValuedNetwork random_valued(std::size_t n, Weight m, double p_zero, std::mt19937_64& rng) {
  std::bernoulli_distribution zero(p_zero);
  std::uniform_int_distribution<Weight> level(1, m);
  ValuedNetwork net(numbered_nodes(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!zero(rng)) net.set_weight(i, j, level(rng));
  return net;
}

/// Attributes x (numeric), c (3 levels) and covariate dist, a lag network,
/// and a time index, all random.
inline ModelData random_data(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelData d;
  d.attributes.nodes = numbered_nodes(n);
  std::vector<double> x(n);
  std::vector<std::string> c(n);
  const char* levels[] = {"east", "north", "west"};
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = u(rng);
    c[i] = levels[std::uniform_int_distribution<int>(0, 2)(rng)];
  }
  d.attributes.numeric["x"] = x;
  d.attributes.categorical["c"] = c;
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist[i * n + j] = dist[j * n + i] = 5 * u(rng);
  d.covariates.emplace("dist", EdgeCovariateMatrix(d.attributes.nodes, dist, "dist"));
  d.lag = EdgeCovariateMatrix::from_network(random_binary(n, 0.4, rng), "memory");
  d.time_index = std::uniform_int_distribution<int>(1, 9)(rng);
  return d;
}

/// Every binary term at once.
inline ModelSpec all_binary_terms(double decay_degree, double decay_esp) {
  ModelSpec s;
  s.terms = {make_term(TermKind::edges),           make_term(TermKind::nodecov, "x"),
             make_term(TermKind::absdiff, "x"),    make_term(TermKind::nodematch, "c"),
             make_term(TermKind::nodefactor, "c"), make_term(TermKind::edgecov, "dist"),
             make_term(TermKind::gwdegree, {}, decay_degree),
             make_term(TermKind::gwesp, {}, decay_esp),
             make_term(TermKind::memory_lag),      make_term(TermKind::time_trend)};
  return s;
}

/// Every valued term at once.
inline ModelSpec all_valued_terms(Weight m) {
  ModelSpec s;
  s.mode = ModelMode::valued;
  s.max_value = m;
  s.terms = {make_term(TermKind::nodecov, "x"),    make_term(TermKind::sum),
             make_term(TermKind::absdiff, "x"),    make_term(TermKind::nonzero),
             make_term(TermKind::nodematch, "c"),  make_term(TermKind::nodefactor, "c"),
             make_term(TermKind::edgecov, "dist"), make_term(TermKind::nodesqrtcovar),
             make_term(TermKind::transitiveweights), make_term(TermKind::memory_lag),
             make_term(TermKind::time_trend)};
  return s;
}

}  // namespace oracle

namespace oracle {

/// Monte-Carlo standard error of a chain average by non-overlapping batch
/// means, robust to the residual autocorrelation of thinned draws.
inline double batch_means_se(const Eigen::VectorXd& x, Eigen::Index batches = 25) {
  const Eigen::Index size = x.size() / batches;
  Eigen::VectorXd means(batches);
  for (Eigen::Index b = 0; b < batches; ++b) means[b] = x.segment(b * size, size).mean();
  const double centre = means.mean();
  const double var = (means.array() - centre).square().sum() / double(batches - 1);
  return std::sqrt(var / double(batches));
}

}  // namespace oracle
