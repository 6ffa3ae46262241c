#include "doctest.h"

#include <random>
#include <sstream>

#include "collabnet/gof.hpp"
#include "collabnet/sampler.hpp"
#include "oracles.hpp"

using namespace collabnet;

namespace {

ModelData plain(std::size_t n) {
  ModelData d;
  d.attributes.nodes = numbered_nodes(n);
  return d;
}

FitResult fitted(std::vector<std::string> labels, std::vector<double> theta, bool converged = true) {
  FitResult f;
  f.labels = std::move(labels);
  f.coefficients = Eigen::Map<const Eigen::VectorXd>(theta.data(), Eigen::Index(theta.size()));
  f.converged = converged;
  return f;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("auxiliary statistics of small fixed graphs") {
  BinaryNetwork k4(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) k4.set_edge(i, j, true);
  const auto a = auxiliary_statistics(k4);
  CHECK(a.degree == std::vector<double>{0, 0, 0, 4});
  CHECK(a.esp == std::vector<double>{0, 0, 6});
  CHECK(a.geodesic == std::vector<double>{6, 0, 0, 0});

  const auto e = auxiliary_statistics(BinaryNetwork(5));
  CHECK(e.degree == std::vector<double>{5, 0, 0, 0, 0});
  CHECK(sum(e.esp) == 0);
  CHECK(e.geodesic.back() == 10);

  BinaryNetwork path(4);
  path.set_edge(0, 1, true);
  path.set_edge(1, 2, true);
  path.set_edge(2, 3, true);
  const auto p = auxiliary_statistics(path);
  CHECK(p.degree == std::vector<double>{0, 2, 2, 0});
  CHECK(p.esp == std::vector<double>{3, 0, 0});
  CHECK(p.geodesic == std::vector<double>{3, 2, 1, 0});
}

TEST_CASE("auxiliary statistics agree with the histogram oracle") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + std::size_t(rep % 11);
    const double density = 0.05 + 0.9 * double(rep % 7) / 6.0;
    const BinaryNetwork net = oracle::random_binary(n, density, rng);
    const auto a = auxiliary_statistics(net);
    const auto h = oracle::histograms(net);
    CHECK(a.degree == h.degree);
    CHECK(a.esp == h.esp);
    CHECK(a.geodesic == h.geodesic);
    CHECK(sum(a.degree) == double(n));
    CHECK(sum(a.esp) == double(net.edge_count()));
    CHECK(sum(a.geodesic) == double(dyad_count(n)));
  }
}

TEST_CASE("gof refuses what it cannot check") {
  const Model m(ModelSpec{{make_term(TermKind::edges)}}, plain(10));
  const BinaryNetwork obs(10);
  GofOptions o;
  o.simulations = 20;
  CHECK_THROWS_AS(gof_binary(fitted({"edges"}, {-1.0}, false), m, obs, o), std::invalid_argument);
  o.allow_nonconverged = true;
  CHECK_NOTHROW(gof_binary(fitted({"edges"}, {-1.0}, false), m, obs, o));
  o.simulations = 19;
  CHECK_THROWS_AS(gof_binary(fitted({"edges"}, {-1.0}), m, obs, o), std::invalid_argument);
  o.simulations = 20;
  CHECK_THROWS_AS(gof_binary(fitted({"edges", "x"}, {-1.0, 0.0}), m, obs, o), std::invalid_argument);
  CHECK_THROWS_AS(gof_valued(fitted({"sum"}, {0.0})), std::logic_error);
}

TEST_CASE("gof envelopes are deterministic and well formed") {
  std::mt19937_64 rng(2);
  const BinaryNetwork obs = oracle::random_binary(15, 0.2, rng);
  const Model m(ModelSpec{{make_term(TermKind::edges), make_term(TermKind::gwesp, "", 0.5)}}, plain(15));
  const auto fit = fitted(m.labels(), {-1.5, 0.2});
  GofOptions o;
  o.simulations = 40;
  o.seed = 9;
  o.threads = 1;
  const auto a = gof_binary(fit, m, obs, o);
  o.threads = 3;
  const auto b = gof_binary(fit, m, obs, o);
  CHECK(a.simulations == 40);
  CHECK(a.degree.q50 == b.degree.q50);
  CHECK(a.geodesic.q95 == b.geodesic.q95);
  CHECK(a.coverage() == b.coverage());
  for (const GofFamily* f : {&a.degree, &a.esp, &a.geodesic}) {
    REQUIRE(f->bins.size() == f->observed.size());
    for (std::size_t k = 0; k < f->bins.size(); ++k) {
      CHECK(f->q05[k] <= f->q50[k]);
      CHECK(f->q50[k] <= f->q95[k]);
      CHECK(f->covered[k] == (f->observed[k] >= f->q05[k] && f->observed[k] <= f->q95[k]));
      if (f->observed[k] != 0) CHECK(f->informative[k]);
    }
  }
  CHECK(a.degree.bins.front() == "0");
  CHECK(a.geodesic.bins.front() == "1");
  CHECK(a.geodesic.bins.back() == "Inf");

  std::ostringstream csv;
  write_gof_csv(csv, a.degree);
  const std::string text = csv.str();
  CHECK(text.rfind("bin,observed,q05,q50,q95,covered\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == std::ptrdiff_t(a.degree.bins.size() + 1));
}

TEST_CASE("gof separates the true model from a wrong one") {
  const std::size_t n = 30;
  const Model m(ModelSpec{{make_term(TermKind::edges)}}, plain(n));
  const std::vector<double> truth{-2.0};
  SamplerConfig c;
  c.burn_in = 20 * dyad_count(n);
  c.sample_count = 1;
  c.seed = 4;
  c.keep_networks = true;
  const BinaryNetwork obs = sample_binary(m, truth, n, c).binary_networks.front();
  GofOptions o;
  o.seed = 1;
  const auto good = gof_binary(fitted({"edges"}, truth), m, obs, o);
  const auto bad = gof_binary(fitted({"edges"}, {truth[0] + 2.0}), m, obs, o);
  CHECK(good.coverage() >= 0.8);
  // Degrees actually present in the observed graph fall outside the wrong
  // model's envelope.
  std::size_t present = 0, inside = 0;
  for (std::size_t k = 0; k < bad.degree.observed.size(); ++k) {
    if (bad.degree.observed[k] == 0) continue;
    ++present;
    inside += bad.degree.covered[k];
  }
  CHECK(double(inside) < 0.25 * double(present));
  CHECK(bad.coverage() < good.coverage());
}
