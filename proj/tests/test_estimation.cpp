#include "doctest.h"

#include <random>

#include "collabnet/estimation.hpp"
#include "collabnet/sampler.hpp"
#include "oracles.hpp"

using namespace collabnet;

namespace {

ModelData plain(std::size_t n) {
  ModelData d;
  d.attributes.nodes = numbered_nodes(n);
  return d;
}

ModelSpec binary(std::vector<TermSpec> terms) {
  ModelSpec s;
  s.terms = std::move(terms);
  return s;
}

ModelSpec valued(Weight m, std::vector<TermSpec> terms) {
  ModelSpec s;
  s.mode = ModelMode::valued;
  s.max_value = m;
  s.terms = std::move(terms);
  return s;
}

double logit(double p) { return std::log(p / (1 - p)); }

BinaryNetwork with_edges(std::size_t n, std::size_t edges) {
  BinaryNetwork net(n);
  std::size_t placed = 0;
  for (std::size_t i = 0; i < n && placed < edges; ++i)
    for (std::size_t j = i + 1; j < n && placed < edges; ++j, ++placed) net.set_edge(i, j, true);
  return net;
}

// n=6 data for the dyad-independent checks: numeric x, two groups c and a
// distance matrix.
ModelData six_node_data() {
  const std::size_t n = 6;
  ModelData d = plain(n);
  d.attributes.numeric["x"] = {0.1, 0.7, 0.4, 0.9, 0.2, 0.5};
  d.attributes.categorical["c"] = {"a", "a", "b", "b", "a", "b"};
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) dist[i * n + j] = 1.0 + double((i + j) % 3);
  d.covariates.emplace("dist", EdgeCovariateMatrix(d.attributes.nodes, dist, "dist"));
  return d;
}

}  // namespace

TEST_CASE("wald p-values and stars") {
  CHECK(wald_p_value(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(wald_p_value(1.959963984540054, 1.0) == doctest::Approx(0.05));
  CHECK(wald_p_value(-2.0, 0.0) == 1.0);
  CHECK(significance_stars(0.0005) == "***");
  CHECK(significance_stars(0.005) == "**");
  CHECK(significance_stars(0.03) == "*");
  CHECK(significance_stars(0.05) == "");
}

TEST_CASE("quantile uses linear interpolation") {
  CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({4, 1, 3, 2}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({7}, 0.9) == 7);
  CHECK(quantile({1, 2}, 0.0) == 1);
  CHECK(quantile({1, 2}, 1.0) == 2);
}

TEST_CASE("edges-only MPLE is the logit of the density") {
  const Model half(binary({make_term(TermKind::edges)}), plain(6));
  const auto h = fit_mple(half, with_edges(6, 7));
  CHECK(h.converged);
  CHECK(std::abs(h.coefficients[0] - logit(7.0 / 15)) < 1e-6);
  const auto zero = fit_mple(Model(binary({make_term(TermKind::edges)}), plain(4)), with_edges(4, 3));
  CHECK(std::abs(zero.coefficients[0]) < 1e-9);

  const Model big(binary({make_term(TermKind::edges)}), plain(170));
  const auto f = fit_mple(big, with_edges(170, 5475));
  CHECK(std::abs(f.coefficients[0] - logit(5475.0 / 14365.0)) < 1e-6);
  CHECK(std::abs(f.coefficients[0] - logit(0.381)) < 5e-3);
  CHECK(logit(0.381) == doctest::Approx(-0.4851).epsilon(1e-3));
  CHECK(f.standard_errors[0] > 0);
}

TEST_CASE("logistic fit matches a grid search of the likelihood") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  LogisticDesign d;
  d.predictors.resize(200, 2);
  d.response.resize(200);
  d.weights = Eigen::VectorXd::Ones(200);
  for (int r = 0; r < 200; ++r) {
    d.predictors(r, 0) = 1.0;
    d.predictors(r, 1) = z(rng);
    const double eta = -0.3 + 0.8 * d.predictors(r, 1);
    d.response[r] = std::bernoulli_distribution(1 / (1 + std::exp(-eta)))(rng);
  }
  const auto fit = fit_logistic(d, {"a", "b"});
  REQUIRE(fit.converged);
  const Eigen::VectorXd grid = oracle::grid_maximize(
      [&](const Eigen::VectorXd& t) { return oracle::logistic_loglik(d.predictors, d.response, t); },
      Eigen::VectorXd::Zero(2), 3.0);
  CHECK(std::abs(fit.coefficients[0] - grid[0]) < 1e-4);
  CHECK(std::abs(fit.coefficients[1] - grid[1]) < 1e-4);

  // Integer weights act as duplicated rows.
  LogisticDesign twice = d;
  twice.weights.setConstant(2.0);
  LogisticDesign stacked;
  stacked.predictors.resize(400, 2);
  stacked.predictors << d.predictors, d.predictors;
  stacked.response.resize(400);
  stacked.response << d.response, d.response;
  stacked.weights = Eigen::VectorXd::Ones(400);
  const auto a = fit_logistic(twice, {"a", "b"});
  const auto b = fit_logistic(stacked, {"a", "b"});
  CHECK((a.coefficients - b.coefficients).norm() < 1e-9);
  CHECK((a.coefficients - fit.coefficients).norm() < 1e-9);
}

TEST_CASE("separation and singular designs are flagged") {
  LogisticDesign allones;
  allones.predictors = Eigen::MatrixXd::Ones(10, 1);
  allones.response = Eigen::VectorXd::Ones(10);
  allones.weights = Eigen::VectorXd::Ones(10);
  const auto s = fit_logistic(allones, {"edges"});
  CHECK(s.separation);
  CHECK_FALSE(s.converged);
  CHECK_FALSE(s.diagnostic.empty());

  LogisticDesign split;
  split.predictors.resize(8, 2);
  split.response.resize(8);
  split.weights = Eigen::VectorXd::Ones(8);
  for (int r = 0; r < 8; ++r) {
    split.predictors(r, 0) = 1;
    split.predictors(r, 1) = r;
    split.response[r] = r >= 4;
  }
  const auto sep = fit_logistic(split, {"a", "b"});
  CHECK(sep.separation);
  CHECK_FALSE(sep.converged);

  std::mt19937_64 rng(5);
  LogisticDesign dup;
  dup.predictors.resize(50, 2);
  dup.response.resize(50);
  dup.weights = Eigen::VectorXd::Ones(50);
  for (int r = 0; r < 50; ++r) {
    dup.predictors(r, 0) = dup.predictors(r, 1) = 1.0;
    dup.response[r] = r % 3 == 0;
  }
  const auto ridge = fit_logistic(dup, {"a", "b"});
  CHECK(ridge.ridge);
  CHECK(ridge.coefficients.allFinite());
  CHECK(ridge.coefficients.sum() == doctest::Approx(logit(17.0 / 50)).epsilon(1e-4));
}

TEST_CASE("dyad-independent MPLE equals the exact MLE") {
  const ModelData d = six_node_data();
  const std::vector<ModelSpec> specs{
      binary({make_term(TermKind::edges), make_term(TermKind::nodecov, "x"),
              make_term(TermKind::absdiff, "x"), make_term(TermKind::edgecov, "dist")}),
      binary({make_term(TermKind::edges), make_term(TermKind::nodematch, "c"),
              make_term(TermKind::nodefactor, "c")})};
  std::size_t interior = 0, boundary = 0;
  for (const auto& spec : specs) {
    const Model m(spec, d);
    REQUIRE(m.dyad_independent());
    const auto space = oracle::enumerate(m, d, 6, 1);
    std::mt19937_64 rng(4);
    for (int draw = 0; draw < 4; ++draw) {
      const BinaryNetwork obs = oracle::random_binary(6, 0.5, rng);
      const auto g = m.statistics(obs);
      const Eigen::VectorXd exact =
          oracle::exact_mle(space, Eigen::Map<const Eigen::VectorXd>(g.data(), Eigen::Index(g.size())));
      const auto mple = fit_mple(m, obs);
      if (exact.cwiseAbs().maxCoeff() > 10.0) {
        // The likelihood keeps rising toward infinity.
        ++boundary;
        CHECK(mple.separation);
        CHECK_FALSE(mple.converged);
        continue;
      }
      ++interior;
      REQUIRE(mple.converged);
      for (Eigen::Index k = 0; k < exact.size(); ++k)
        CHECK(std::abs(mple.coefficients[k] - exact[k]) < 1e-4);
      if (draw == 0) {
        const auto lib = exact_mle_small(m, obs);
        for (Eigen::Index k = 0; k < exact.size(); ++k)
          CHECK(std::abs(lib.coefficients[k] - exact[k]) < 1e-4);
      }
    }
  }
  CHECK(interior >= 4);
  CHECK(boundary >= 1);
}

TEST_CASE("exact MLE on tiny graphs") {
  const Model e(binary({make_term(TermKind::edges)}), plain(5));
  const auto fit = exact_mle_small(e, with_edges(5, 4));
  CHECK(std::abs(fit.coefficients[0] - logit(0.4)) < 1e-6);

  ModelData d = plain(5);
  d.attributes.categorical["g"] = {"a", "a", "a", "b", "b"};
  const Model m(binary({make_term(TermKind::edges), make_term(TermKind::nodematch, "g")}), d);
  BinaryNetwork obs(5);
  obs.set_edge(0, 1, true);
  obs.set_edge(3, 4, true);
  obs.set_edge(0, 3, true);
  obs.set_edge(1, 2, true);
  const auto lib = exact_mle_small(m, obs);
  const auto space = oracle::enumerate(m, d, 5, 1);
  const auto g = m.statistics(obs);
  const Eigen::VectorXd gobs = Eigen::Map<const Eigen::VectorXd>(g.data(), 2);
  const Eigen::VectorXd grid = oracle::grid_maximize(
      [&](const Eigen::VectorXd& t) { return oracle::log_likelihood(space, t, gobs); },
      Eigen::VectorXd::Zero(2), 4.0);
  CHECK(std::abs(lib.coefficients[0] - grid[0]) < 1e-3);
  CHECK(std::abs(lib.coefficients[1] - grid[1]) < 1e-3);

  const auto empty = exact_mle_small(e, BinaryNetwork(5));
  CHECK(empty.separation);
  CHECK_FALSE(empty.converged);

  const Model big(binary({make_term(TermKind::edges)}), plain(8));
  CHECK_THROWS(exact_mle_small(big, BinaryNetwork(8)));
}

TEST_CASE("valued MPLE of a sum-only model inverts the binomial mean") {
  const Model m(valued(5, {make_term(TermKind::sum)}), plain(6));
  ValuedNetwork net(numbered_nodes(6));
  Weight v = 0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) net.set_weight(i, j, v++ % 6);
  // 15 dyads with values 0..5 repeating: mean 2.
  const double mean = double(net.total_weight()) / 15.0;
  const auto fit = fit_valued_mple(m, net);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coefficients[0] - logit(mean / 5)) < 1e-6);

  ValuedNetwork flat(numbered_nodes(5));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) flat.set_weight(i, j, (i + j) % 2 ? 2 : 3);
  const Model m5(valued(5, {make_term(TermKind::sum)}), plain(5));
  CHECK(std::abs(fit_valued_mple(m5, flat).coefficients[0] -
                 logit(double(flat.total_weight()) / 50.0)) < 1e-6);
}

TEST_CASE("valued exact MLE against the oracle") {
  ModelData d = plain(4);
  const Model m(valued(2, {make_term(TermKind::sum), make_term(TermKind::nonzero),
                           make_term(TermKind::nodesqrtcovar)}),
                d);
  ValuedNetwork obs(numbered_nodes(4));
  obs.set_weight(0, 3, 1);
  obs.set_weight(1, 2, 2);
  obs.set_weight(1, 3, 1);
  obs.set_weight(2, 3, 2);
  const auto space = oracle::enumerate(m, d, 4, 2);
  const auto g = m.statistics(obs);
  const Eigen::VectorXd exact =
      oracle::exact_mle(space, Eigen::Map<const Eigen::VectorXd>(g.data(), 3));
  const auto lib = exact_mle_small(m, obs);
  REQUIRE(lib.converged);
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(std::abs(lib.coefficients[k] - exact[k]) < 1e-6);
}

TEST_CASE("MC-MLE agrees with closed forms and exact likelihoods") {
  const Model m(valued(5, {make_term(TermKind::sum)}), plain(10));
  std::mt19937_64 rng(8);
  const ValuedNetwork net = oracle::random_valued(10, 5, 0.2, rng);
  McmleOptions o;
  o.samples = 2000;
  o.seed = 5;
  const auto fit = fit_vergm_mcmle(m, net, o);
  REQUIRE(fit.converged);
  const double closed = logit(double(net.total_weight()) / (5.0 * 45));
  CHECK(std::abs(fit.coefficients[0] - closed) < 3 * fit.standard_errors[0]);
  CHECK(std::abs(fit.t_ratios[0]) < 0.1);
  CHECK(fit.sample_statistics.rows() == 2000);

  // Dependent model, small enough for the exact likelihood.
  ModelData d = plain(4);
  const Model dep(valued(2, {make_term(TermKind::sum), make_term(TermKind::nonzero),
                             make_term(TermKind::nodesqrtcovar)}),
                  d);
  ValuedNetwork obs(numbered_nodes(4));
  obs.set_weight(0, 1, 1);
  obs.set_weight(0, 3, 1);
  obs.set_weight(1, 2, 1);
  obs.set_weight(1, 3, 2);
  obs.set_weight(2, 3, 2);
  const auto exact = exact_mle_small(dep, obs);
  o.samples = 20000;
  o.interval = 12;
  const auto mc = fit_vergm_mcmle(dep, obs, o);
  REQUIRE(mc.converged);
  for (Eigen::Index k = 0; k < 3; ++k) {
    CHECK(std::abs(mc.coefficients[k] - exact.coefficients[k]) < 0.5 * mc.standard_errors[k]);
    CHECK(mc.standard_errors[k] == doctest::Approx(exact.standard_errors[k]).epsilon(0.15));
  }
}

TEST_CASE("MC-MLE flags statistics frozen at the boundary") {
  const Model m(valued(3, {make_term(TermKind::sum), make_term(TermKind::nonzero)}), plain(6));
  ValuedNetwork full(numbered_nodes(6));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) full.set_weight(i, j, 1 + (i + j) % 3);
  McmleOptions o;
  o.samples = 500;
  o.seed = 2;
  const auto fit = fit_vergm_mcmle(m, full, o);
  CHECK(fit.separation);
  CHECK_FALSE(fit.converged);
  CHECK(std::isinf(fit.standard_errors[1]));
  CHECK(fit.diagnostic.find("nonzero") != std::string::npos);
}

TEST_CASE("VIF diagnostics") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> z;
  Eigen::MatrixXd indep(20000, 3);
  for (Eigen::Index r = 0; r < indep.rows(); ++r)
    for (Eigen::Index c = 0; c < 3; ++c) indep(r, c) = z(rng);
  const auto v = vif_diagnostics(indep);
  for (Eigen::Index c = 0; c < 3; ++c) CHECK(std::abs(v[c] - 1.0) < 0.1);

  Eigen::MatrixXd corr(20000, 2);
  for (Eigen::Index r = 0; r < corr.rows(); ++r) {
    const double a = z(rng), b = z(rng);
    corr(r, 0) = a;
    corr(r, 1) = 0.9 * a + std::sqrt(1 - 0.81) * b;
  }
  const auto w = vif_diagnostics(corr);
  CHECK(std::abs(w[0] - 1 / (1 - 0.81)) < 0.5);
  CHECK(std::abs(w[1] - 1 / (1 - 0.81)) < 0.5);

  Eigen::MatrixXd dup(100, 3);
  for (Eigen::Index r = 0; r < 100; ++r) {
    dup(r, 0) = z(rng);
    dup(r, 1) = 2 * dup(r, 0) + 1;
    dup(r, 2) = 4.0;
  }
  const auto d = vif_diagnostics(dup);
  CHECK(std::isinf(d[0]));
  CHECK(std::isinf(d[1]));
  CHECK(std::isinf(d[2]));
  CHECK_THROWS(vif_diagnostics(Eigen::MatrixXd::Zero(3, 3)));
}

TEST_CASE("temporal periods carry the lag and a 1-based index") {
  std::mt19937_64 rng(21);
  std::vector<BinaryNetwork> series;
  for (int t = 0; t < 4; ++t) series.push_back(oracle::random_binary(6, 0.4, rng));
  const std::vector<ModelData> data(4, plain(6));
  const auto periods = tergm_periods(series, data);
  REQUIRE(periods.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(periods[t].network == series[t + 1]);
    CHECK(periods[t].data.time_index == int(t + 1));
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        if (i != j) CHECK(periods[t].data.lag->at(i, j) == double(series[t].has_edge(i, j)));
  }
  CHECK_THROWS(tergm_periods(std::span(series).first(1), std::span(data).first(1)));
}

namespace {

struct Fixture {
  std::vector<BinaryNetwork> series;
  std::vector<ModelData> data;
};

// Series simulated from edges + absdiff.x + memory with known coefficients.
Fixture temporal_fixture(std::size_t n, std::size_t years, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelData base = plain(n);
  std::vector<double> x(n);
  std::uniform_real_distribution<double> u;
  for (auto& v : x) v = u(rng);
  base.attributes.numeric["x"] = x;
  const ModelSpec spec = binary({make_term(TermKind::edges), make_term(TermKind::absdiff, "x"),
                                 make_term(TermKind::memory_lag)});
  const std::vector<double> theta{-2.0, -0.5, 1.5};
  Fixture f;
  BinaryNetwork prev = oracle::random_binary(n, 0.15, rng);
  f.series.push_back(prev);
  f.data.push_back(base);
  for (std::size_t t = 1; t < years; ++t) {
    ModelData d = base;
    d.lag = EdgeCovariateMatrix::from_network(prev, "memory");
    const Model m(spec, d);
    SamplerConfig c;
    c.burn_in = 20 * dyad_count(n);
    c.sample_count = 1;
    c.seed = seed * 100 + t;
    c.keep_networks = true;
    prev = sample_binary(m, theta, n, c).binary_networks.front();
    f.series.push_back(prev);
    f.data.push_back(base);
  }
  return f;
}

}  // namespace

TEST_CASE("bootstrap flags follow the interval rule and are deterministic") {
  const Fixture f = temporal_fixture(30, 6, 3);
  const ModelSpec spec = binary({make_term(TermKind::edges), make_term(TermKind::absdiff, "x"),
                                 make_term(TermKind::memory_lag), make_term(TermKind::time_trend)});
  BootstrapOptions o;
  o.replications = 200;
  o.seed = 17;
  o.threads = 1;
  const auto a = fit_tergm_bootstrap(spec, f.series, f.data, o);
  o.threads = 4;
  const auto b = fit_tergm_bootstrap(spec, f.series, f.data, o);
  CHECK(a.replicates == b.replicates);
  CHECK(a.periods == 5);
  CHECK(a.labels == std::vector<std::string>{"edges", "absdiff.x", "memory", "timetrend"});
  CHECK(std::size_t(a.replicates.rows()) + a.dropped == 200);
  for (std::size_t k = 0; k < a.labels.size(); ++k) {
    const auto kk = Eigen::Index(k);
    CHECK(a.ci_low[kk] <= a.ci_high[kk]);
    CHECK(a.significant[k] == (a.ci_low[kk] > 0 || a.ci_high[kk] < 0));
  }
  CHECK(a.ci_low[2] > 0.0);
  CHECK(a.mean[2] > 0.5);

  CHECK_THROWS(fit_tergm_bootstrap(spec, f.series, f.data, BootstrapOptions{0, 1, 1, 0.95, {}}));
}

TEST_CASE("degenerate bootstrap cases") {
  const Fixture f = temporal_fixture(20, 2, 9);
  const ModelSpec spec = binary({make_term(TermKind::edges), make_term(TermKind::memory_lag)});
  BootstrapOptions o;
  o.replications = 50;
  o.seed = 1;
  // A single modeled period: every resample is that period.
  const auto one = fit_tergm_bootstrap(spec, f.series, f.data, o);
  for (Eigen::Index k = 0; k < 2; ++k) {
    CHECK(one.ci_low[k] == doctest::Approx(one.point.coefficients[k]));
    CHECK(one.ci_high[k] == doctest::Approx(one.point.coefficients[k]));
  }
  o.replications = 1;
  const auto r1 = fit_tergm_bootstrap(spec, f.series, f.data, o);
  CHECK(r1.ci_low[0] == r1.ci_high[0]);
  CHECK(r1.mean[0] == r1.ci_low[0]);
}

TEST_CASE("memory on a static series is large and positive") {
  // Three nodes, one tie held fixed over four years.
  BinaryNetwork net(3);
  net.set_edge(0, 1, true);
  const std::vector<BinaryNetwork> series(4, net);
  const std::vector<ModelData> data(4, plain(3));
  const ModelSpec spec = binary({make_term(TermKind::edges), make_term(TermKind::memory_lag)});
  const auto periods = tergm_periods(series, data);
  const auto pooled = fit_mple(Model(spec, periods[0].data), net);
  CHECK(pooled.coefficients[1] > 5.0);
  BootstrapOptions o;
  o.replications = 50;
  const auto fit = fit_tergm_bootstrap(spec, series, data, o);
  CHECK(fit.point.coefficients[1] > 5.0);
  if (fit.replicates.rows() > 0) {
    CHECK(fit.ci_low[1] > 0.0);
    CHECK(fit.significant[1]);
  }
}
