#include "collabnet/gof.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>
#include <ostream>
#include <stdexcept>

#include "collabnet/parallel.hpp"
#include "collabnet/sampler.hpp"

namespace collabnet {

AuxiliaryStatistics auxiliary_statistics(const BinaryNetwork& net) {
  const std::size_t n = net.size();
  AuxiliaryStatistics aux;
  aux.degree.assign(n, 0.0);
  aux.esp.assign(n < 2 ? 1 : n - 1, 0.0);
  aux.geodesic.assign(n < 2 ? 1 : n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    aux.degree[net.degree(i)] += 1.0;
    for (std::size_t j = i + 1; j < n; ++j)
      if (net.has_edge(i, j)) aux.esp[net.shared_partners(i, j)] += 1.0;
  }
  std::vector<std::size_t> dist(n);
  std::deque<std::size_t> queue;
  const std::size_t unreached = n;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), unreached);
    dist[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : net.neighbors(u)) {
        if (dist[v] == unreached) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t t = s + 1; t < n; ++t)
      aux.geodesic[dist[t] == unreached ? n - 1 : dist[t] - 1] += 1.0;
  }
  return aux;
}

std::size_t GofFamily::informative_bins() const {
  return static_cast<std::size_t>(std::count(informative.begin(), informative.end(), true));
}

std::size_t GofFamily::covered_informative_bins() const {
  std::size_t c = 0;
  for (std::size_t b = 0; b < bins.size(); ++b) c += informative[b] && covered[b];
  return c;
}

double GofReport::coverage() const {
  const std::size_t total =
      degree.informative_bins() + esp.informative_bins() + geodesic.informative_bins();
  if (total == 0) return 1.0;
  const std::size_t hit = degree.covered_informative_bins() + esp.covered_informative_bins() +
                          geodesic.covered_informative_bins();
  return static_cast<double>(hit) / static_cast<double>(total);
}

namespace {

GofFamily envelope(std::string name, std::vector<std::string> bins, const std::vector<double>& observed,
                   const std::vector<std::vector<double>>& simulated) {
  GofFamily f;
  f.name = std::move(name);
  f.bins = std::move(bins);
  f.observed = observed;
  const std::size_t B = observed.size();
  std::vector<double> column(simulated.size());
  for (std::size_t b = 0; b < B; ++b) {
    bool any = observed[b] != 0.0;
    for (std::size_t s = 0; s < simulated.size(); ++s) {
      column[s] = simulated[s][b];
      any = any || column[s] != 0.0;
    }
    f.q05.push_back(quantile(column, 0.05));
    f.q50.push_back(quantile(column, 0.50));
    f.q95.push_back(quantile(column, 0.95));
    f.covered.push_back(observed[b] >= f.q05.back() && observed[b] <= f.q95.back());
    f.informative.push_back(any);
  }
  return f;
}

}  // namespace

GofReport gof_binary(const FitResult& fit, const Model& model, const BinaryNetwork& observed,
                     const GofOptions& options) {
  if (model.mode() != ModelMode::binary) gof_valued(fit);
  if (!fit.converged && !options.allow_nonconverged) {
    throw std::invalid_argument(
        "goodness of fit refused for a non-converged fit (set allow_nonconverged to override)");
  }
  if (options.simulations < 20) throw std::invalid_argument("goodness of fit needs at least 20 simulations");
  if (static_cast<std::size_t>(fit.coefficients.size()) != model.dimension()) {
    throw std::invalid_argument("fit and model have different dimensions");
  }
  const std::size_t n = observed.size();
  const std::size_t dyads = std::max<std::size_t>(dyad_count(n), 1);

  SamplerConfig config;
  config.burn_in = options.burn_in ? options.burn_in : 10 * dyads;
  config.interval = options.interval ? options.interval : dyads;
  config.sample_count = options.simulations;
  config.seed = options.seed;
  config.keep_networks = true;
  const SampleBatch batch = sample_binary(
      model, {fit.coefficients.data(), static_cast<std::size_t>(fit.coefficients.size())}, observed,
      config);

  const std::size_t S = batch.binary_networks.size();
  std::vector<AuxiliaryStatistics> sims(S);
  parallel_for(S, options.threads,
               [&](std::size_t s) { sims[s] = auxiliary_statistics(batch.binary_networks[s]); });
  const AuxiliaryStatistics obs = auxiliary_statistics(observed);

  auto gather = [&](auto member) {
    std::vector<std::vector<double>> out;
    out.reserve(S);
    for (const auto& a : sims) out.push_back(a.*member);
    return out;
  };
  auto numbered = [](std::size_t count, std::size_t first) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < count; ++k) labels.push_back(std::to_string(first + k));
    return labels;
  };
  std::vector<std::string> geo_bins = numbered(obs.geodesic.size() - 1, 1);
  geo_bins.push_back("Inf");

  GofReport report;
  report.simulations = S;
  report.degree = envelope("degree", numbered(obs.degree.size(), 0), obs.degree,
                           gather(&AuxiliaryStatistics::degree));
  report.esp = envelope("esp", numbered(obs.esp.size(), 0), obs.esp, gather(&AuxiliaryStatistics::esp));
  report.geodesic = envelope("geodesic", std::move(geo_bins), obs.geodesic,
                             gather(&AuxiliaryStatistics::geodesic));
  return report;
}

void gof_valued(const FitResult&) {
  throw std::logic_error("goodness of fit is not implemented for valued models");
}

void write_gof_csv(std::ostream& out, const GofFamily& family) {
  out << "bin,observed,q05,q50,q95,covered\n";
  for (std::size_t b = 0; b < family.bins.size(); ++b) {
    out << fmt::format("{},{},{},{},{},{}\n", family.bins[b], family.observed[b], family.q05[b],
                       family.q50[b], family.q95[b], family.covered[b] ? 1 : 0);
  }
}

}  // namespace collabnet
