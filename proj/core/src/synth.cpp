#include "collabnet/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "collabnet/descriptives.hpp"
#include "collabnet/rng.hpp"
#include "collabnet/sampler.hpp"

namespace collabnet {

namespace {

// Stream ids for derive_seed.
constexpr std::uint64_t kAttributeStream = 1;
constexpr std::uint64_t kWeightStream = 2;
constexpr std::uint64_t kPresenceStream = 100;

double beta22(Rng& rng) {
  std::gamma_distribution<double> g(2.0, 1.0);
  const double a = g(rng);
  const double b = g(rng);
  return a / (a + b);
}

}  // namespace

ModelSpec SynthConfig::default_presence_model() {
  ModelSpec spec;
  spec.terms = {make_term(TermKind::edges), make_term(TermKind::absdiff, "libdem"),
                make_term(TermKind::memory_lag)};
  return spec;
}

std::string synthetic_code(std::size_t k) {
  if (k >= 26 * 26 * 26) throw std::out_of_range("synthetic code index too large");
  std::string code(3, 'A');
  code[2] = static_cast<char>('A' + k % 26);
  code[1] = static_cast<char>('A' + (k / 26) % 26);
  code[0] = static_cast<char>('A' + k / 676);
  return code;
}

ModelData model_data(const AttributePanel& panel, const NodeList& nodes, int year,
                     std::map<std::string, EdgeCovariateMatrix> covariates) {
  ModelData data;
  data.attributes = panel.snapshot(nodes, year);
  data.covariates = std::move(covariates);
  return data;
}

SyntheticData generate_synthetic(const SynthConfig& config) {
  if (config.nodes < 3) throw std::invalid_argument("synthetic fixture needs at least 3 nodes");
  if (config.years < 1) throw std::invalid_argument("synthetic fixture needs at least one year");
  const std::size_t n = config.nodes;
  NodeList nodes;
  for (std::size_t k = 0; k < n; ++k) nodes.push_back(synthetic_code(k));

  SyntheticData out;
  out.presence_theta = config.presence_theta;

  // Attributes
  Rng rng = make_rng(config.seed, kAttributeStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> libdem(n), gdp(n), pop(n), urban(n), authors(n), x(n), y(n);
  std::vector<std::string> region(n);
  for (std::size_t i = 0; i < n; ++i) {
    libdem[i] = beta22(rng);
    gdp[i] = 9.0 + 1.2 * normal(rng);
    pop[i] = 16.0 + 1.5 * normal(rng);
    urban[i] = 20.0 + 75.0 * uniform01(rng);
    authors[i] = 7.0 + 1.5 * normal(rng);
    region[i] = fmt::format("R{:02}", 1 + uniform_index(rng, 10));
    x[i] = 4000.0 * uniform01(rng);
    y[i] = 4000.0 * uniform01(rng);
  }
  std::vector<std::vector<double>> authors_by_year(config.years);
  for (std::size_t t = 0; t < config.years; ++t) {
    const int year = config.first_year + static_cast<int>(t);
    authors_by_year[t].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (t > 0) libdem[i] = std::clamp(libdem[i] + 0.02 * normal(rng), 0.0, 1.0);
      const double dt = static_cast<double>(t);
      out.panel.set_numeric(nodes[i], year, "libdem", libdem[i]);
      out.panel.set_numeric(nodes[i], year, "ln_gdp_pc", gdp[i] + 0.02 * dt);
      out.panel.set_numeric(nodes[i], year, "ln_population", pop[i]);
      out.panel.set_numeric(nodes[i], year, "urbanization", urban[i]);
      authors_by_year[t][i] = authors[i] + 0.05 * dt;
      out.panel.set_numeric(nodes[i], year, "ln_authors", authors_by_year[t][i]);
      out.panel.set_categorical(nodes[i], year, "region", region[i]);
    }
  }
  out.distances_km.nodes = nodes;
  out.distances_km.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.distances_km.values[i * n + j] = std::round(std::hypot(x[i] - x[j], y[i] - y[j]));
  out.distance = build_distance_covariate(out.distances_km);

  // Presence
  const std::size_t dyads = dyad_count(n);
  BinaryNetwork previous(nodes);
  for (std::size_t t = 0; t < config.years; ++t) {
    const int year = config.first_year + static_cast<int>(t);
    ModelData data = model_data(out.panel, nodes, year, {{"distance", out.distance}});
    data.lag = t == 0 ? EdgeCovariateMatrix::constant(nodes, 0.0, "memory")
                      : EdgeCovariateMatrix::from_network(previous, "memory");
    data.time_index = static_cast<int>(t) + 1;
    const Model model(config.presence, data);
    if (model.dimension() != config.presence_theta.size()) {
      throw std::invalid_argument(fmt::format("presence model has {} statistics but {} coefficients",
                                              model.dimension(), config.presence_theta.size()));
    }
    SamplerConfig sc;
    sc.burn_in = config.sweeps * dyads;
    sc.interval = 1;
    sc.sample_count = 1;
    sc.seed = derive_seed(config.seed, kPresenceStream + t);
    sc.keep_networks = true;
    BinaryNetwork net = std::move(sample_binary(model, config.presence_theta, previous, sc).binary_networks.front());
    net.set_year(year);
    const double d = density(net);
    if (d < 0.01 || d > 0.99) {
      out.degenerate = true;
      out.warnings.push_back(fmt::format("year {} is degenerate (density {:.4f})", year, d));
    }
    out.presence.push_back(net);
    previous = std::move(net);
  }

  // Weights and publications
  Rng wrng = make_rng(config.seed, kWeightStream);
  std::vector<ValuedNetwork> yearly;
  for (std::size_t t = 0; t < config.years; ++t) {
    const int year = config.first_year + static_cast<int>(t);
    ValuedNetwork net(nodes, year);
    const auto& a = authors_by_year[t];
    std::size_t paper = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!out.presence[t].has_edge(i, j)) continue;
        const double mu = config.weight_intercept + config.weight_authors * ((a[i] - 7.0) + (a[j] - 7.0));
        const double draw = std::exp(mu + config.weight_sigma * normal(wrng));
        const auto w = static_cast<Weight>(1.0 + std::floor(std::min(draw, 1e6)));
        net.set_weight(i, j, w);
        if (config.publications) {
          for (Weight k = 0; k < w; ++k) {
            out.publications.push_back(
                {year, fmt::format("P{}-{:06}", year, paper++), {nodes[i], nodes[j]}});
          }
        }
      }
    }
    yearly.push_back(std::move(net));
  }
  out.series = NetworkSeries(std::move(yearly));
  return out;
}

SynthConfig calibrate_density(SynthConfig config, double target, std::size_t edges_index,
                              double tolerance, std::size_t max_rounds) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target density must lie in (0,1)");
  if (edges_index >= config.presence_theta.size()) throw std::out_of_range("edges index out of range");
  SynthConfig probe = config;
  probe.publications = false;
  const auto logit = [](double p) { return std::log(p / (1.0 - p)); };
  for (std::size_t round = 0; round < max_rounds; ++round) {
    const SyntheticData data = generate_synthetic(probe);
    double mean = 0.0;
    for (const auto& net : data.presence) mean += density(net);
    mean /= static_cast<double>(data.presence.size());
    if (std::abs(mean - target) < tolerance) break;
    const double clipped = std::clamp(mean, 1e-4, 1.0 - 1e-4);
    probe.presence_theta[edges_index] += logit(target) - logit(clipped);
  }
  config.presence_theta = probe.presence_theta;
  return config;
}

}  // namespace collabnet
