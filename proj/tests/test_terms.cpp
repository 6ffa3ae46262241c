#include "doctest.h"

#include <numeric>
#include <random>

#include "collabnet/terms.hpp"
#include "oracles.hpp"

using namespace collabnet;

namespace {

ModelData plain(std::size_t n) {
  ModelData d;
  d.attributes.nodes = numbered_nodes(n);
  return d;
}

ModelSpec single(TermKind kind, double decay = 0.0, ModelMode mode = ModelMode::binary,
                 Weight m = 1) {
  ModelSpec s;
  s.mode = mode;
  s.max_value = m;
  s.terms = {make_term(kind, {}, decay)};
  return s;
}

BinaryNetwork triangle() {
  BinaryNetwork t(3);
  t.set_edge(0, 1, true);
  t.set_edge(1, 2, true);
  t.set_edge(0, 2, true);
  return t;
}

}  // namespace

TEST_CASE("cancellation identities hold for any decay") {
  for (double decay : {0.1, 0.25, 0.5, 1.0, 3.0}) {
    const Model esp(single(TermKind::gwesp, decay), plain(3));
    CHECK(esp.statistics(triangle())[0] == doctest::Approx(3.0));
    BinaryNetwork one(2);
    one.set_edge(0, 1, true);
    const Model deg(single(TermKind::gwdegree, decay), plain(2));
    CHECK(deg.statistics(one)[0] == doctest::Approx(2.0));
  }
}

TEST_CASE("valued term examples") {
  ValuedNetwork tri(numbered_nodes(3));
  tri.set_weight(0, 1, 1);
  tri.set_weight(1, 2, 1);
  tri.set_weight(0, 2, 1);
  const Model tw(single(TermKind::transitiveweights, 0, ModelMode::valued, 5), plain(3));
  CHECK(tw.statistics(tri)[0] == doctest::Approx(3.0));

  ValuedNetwork path(numbered_nodes(3));
  path.set_weight(0, 1, 2);
  path.set_weight(1, 2, 3);
  CHECK(tw.statistics(path)[0] == doctest::Approx(0.0));

  ValuedNetwork star(numbered_nodes(3));
  star.set_weight(0, 1, 4);
  star.set_weight(0, 2, 9);
  const Model sq(single(TermKind::nodesqrtcovar, 0, ModelMode::valued, 9), plain(3));
  CHECK(sq.statistics(star)[0] == doctest::Approx(6.0));
}

TEST_CASE("large decay tends to raw counts") {
  std::mt19937_64 rng(3);
  const BinaryNetwork net = oracle::random_binary(10, 0.4, rng);
  const Model deg(single(TermKind::gwdegree, 12.0), plain(10));
  const Model esp(single(TermKind::gwesp, 12.0), plain(10));
  double nonisolates = 0, with_partner = 0;
  for (std::size_t i = 0; i < 10; ++i) nonisolates += net.degree(i) > 0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j)
      if (net.has_edge(i, j) && net.shared_partners(i, j) > 0) with_partner += 1;
  // e^a (1 - (1 - e^-a)^k) -> k as a grows.
  double degree_sum = 0, partner_sum = 0;
  for (std::size_t i = 0; i < 10; ++i) degree_sum += double(net.degree(i));
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j)
      if (net.has_edge(i, j)) partner_sum += double(net.shared_partners(i, j));
  CHECK(deg.statistics(net)[0] == doctest::Approx(degree_sum).epsilon(1e-4));
  CHECK(esp.statistics(net)[0] == doctest::Approx(partner_sum).epsilon(1e-4));
  CHECK(nonisolates <= degree_sum);
  CHECK(with_partner <= partner_sum);
}

TEST_CASE("change statistics for simple terms") {
  std::mt19937_64 rng(6);
  ModelData d = plain(6);
  d.attributes.categorical["region"] = {"a", "a", "b", "b", "a", "c"};
  ModelSpec s;
  s.terms = {make_term(TermKind::edges), make_term(TermKind::nodematch, "region")};
  const Model m(s, d);
  const BinaryNetwork net = oracle::random_binary(6, 0.5, rng);
  CHECK(m.change_binary(net, 0, 1) == std::vector<double>{1.0, 1.0});
  CHECK(m.change_binary(net, 0, 2) == std::vector<double>{1.0, 0.0});
  CHECK_THROWS(m.change_binary(net, 2, 2));
  CHECK_THROWS(m.change_binary(net, 0, 6));
}

TEST_CASE("valued deltas for sum and nonzero") {
  ModelSpec s;
  s.mode = ModelMode::valued;
  s.max_value = 5;
  s.terms = {make_term(TermKind::sum), make_term(TermKind::nonzero)};
  const Model m(s, plain(3));
  ValuedNetwork net(numbered_nodes(3));
  CHECK(m.delta_valued(net, 0, 1, 3) == std::vector<double>{3.0, 1.0});
  net.set_weight(0, 1, 3);
  CHECK(m.delta_valued(net, 0, 1, 0) == std::vector<double>{-3.0, -1.0});
  net.set_weight(0, 1, 2);
  CHECK(m.delta_valued(net, 0, 1, 4) == std::vector<double>{2.0, 0.0});
  CHECK_THROWS(m.delta_valued(net, 0, 1, 6));
}

TEST_CASE("gwesp change on random graphs equals the full-recompute difference") {
  std::mt19937_64 rng(17);
  const Model m(single(TermKind::gwesp, 0.25), plain(10));
  for (int rep = 0; rep < 200; ++rep) {
    BinaryNetwork net = oracle::random_binary(10, 0.45, rng);
    const std::size_t i = rep % 10, j = (i + 1 + (rep / 10) % 9) % 10;
    const double change = m.change_binary(net, i, j)[0];
    net.set_edge(i, j, true);
    const double plus = oracle::statistics(m, plain(10), oracle::dense(net))[0];
    net.set_edge(i, j, false);
    const double minus = oracle::statistics(m, plain(10), oracle::dense(net))[0];
    CHECK(std::abs(change - (plus - minus)) < 1e-9);
  }
}

TEST_CASE("nodesqrtcovar delta on random valued nets equals full recomputation") {
  std::mt19937_64 rng(29);
  const Model m(single(TermKind::nodesqrtcovar, 0, ModelMode::valued, 6), plain(8));
  std::uniform_int_distribution<Weight> value(0, 6);
  for (int rep = 0; rep < 200; ++rep) {
    ValuedNetwork net = oracle::random_valued(8, 6, 0.3, rng);
    const std::size_t i = rep % 8, j = (i + 1 + (rep / 8) % 7) % 8;
    const Weight v = value(rng);
    const double delta = m.delta_valued(net, i, j, v)[0];
    const double before = oracle::statistics(m, plain(8), oracle::dense(net))[0];
    net.set_weight(i, j, v);
    const double after = oracle::statistics(m, plain(8), oracle::dense(net))[0];
    CHECK(std::abs(delta - (after - before)) < 1e-9);
  }
}

TEST_CASE("full statistics of every term match the oracle") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rep % 10;
    const ModelData d = oracle::random_data(n, rng);
    const Model b(oracle::all_binary_terms(0.5, 0.25), d);
    const BinaryNetwork net = oracle::random_binary(n, 0.4, rng);
    const auto got = b.statistics(net);
    const auto want = oracle::statistics(b, d, oracle::dense(net));
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]));

    const Model v(oracle::all_valued_terms(4), d);
    const ValuedNetwork vnet = oracle::random_valued(n, 4, 0.4, rng);
    const auto vgot = v.statistics(vnet);
    const auto vwant = oracle::statistics(v, d, oracle::dense(vnet));
    for (std::size_t k = 0; k < vgot.size(); ++k) CHECK(vgot[k] == doctest::Approx(vwant[k]));
  }
}

TEST_CASE("transitiveweights never exceeds sum") {
  std::mt19937_64 rng(31);
  ModelSpec s;
  s.mode = ModelMode::valued;
  s.max_value = 7;
  s.terms = {make_term(TermKind::sum), make_term(TermKind::transitiveweights)};
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rep % 9;
    const Model m(s, plain(n));
    const auto g = m.statistics(oracle::random_valued(n, 7, 0.3, rng));
    CHECK(g[1] <= g[0]);
  }
}

TEST_CASE("nodematch plus cross-group ties equals edges") {
  std::mt19937_64 rng(37);
  ModelData d = plain(12);
  std::vector<std::string> group(12);
  for (std::size_t i = 0; i < 12; ++i) group[i] = i % 3 ? "g1" : "g2";
  d.attributes.categorical["g"] = group;
  ModelSpec s;
  s.terms = {make_term(TermKind::edges), make_term(TermKind::nodematch, "g")};
  const Model m(s, d);
  for (int rep = 0; rep < 50; ++rep) {
    const BinaryNetwork net = oracle::random_binary(12, 0.3, rng);
    double cross = 0;
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = i + 1; j < 12; ++j) cross += net.has_edge(i, j) && group[i] != group[j];
    const auto g = m.statistics(net);
    CHECK(g[1] + cross == g[0]);
  }
}

TEST_CASE("statistics are invariant under node relabeling") {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 4 + rep % 8;
    const ModelData d = oracle::random_data(n, rng);
    const BinaryNetwork net = oracle::random_binary(n, 0.4, rng);
    const ValuedNetwork vnet = oracle::random_valued(n, 3, 0.4, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    ModelData pd = d;
    for (auto& [name, values] : pd.attributes.numeric)
      for (std::size_t i = 0; i < n; ++i) values[perm[i]] = d.attributes.numeric.at(name)[i];
    for (auto& [name, values] : pd.attributes.categorical)
      for (std::size_t i = 0; i < n; ++i) values[perm[i]] = d.attributes.categorical.at(name)[i];
    auto permute = [&](const EdgeCovariateMatrix& c) {
      std::vector<double> v(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[perm[i] * n + perm[j]] = c.at(i, j);
      return EdgeCovariateMatrix(c.nodes(), v, c.label());
    };
    pd.covariates.clear();
    for (const auto& [name, c] : d.covariates) pd.covariates.emplace(name, permute(c));
    pd.lag = permute(*d.lag);
    BinaryNetwork pnet(n);
    ValuedNetwork pvnet(numbered_nodes(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        pnet.set_edge(perm[i], perm[j], net.has_edge(i, j));
        pvnet.set_weight(perm[i], perm[j], vnet.weight(i, j));
      }

    const auto a = Model(oracle::all_binary_terms(0.5, 0.25), d).statistics(net);
    const auto b = Model(oracle::all_binary_terms(0.5, 0.25), pd).statistics(pnet);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]));
    const auto va = Model(oracle::all_valued_terms(3), d).statistics(vnet);
    const auto vb = Model(oracle::all_valued_terms(3), pd).statistics(pvnet);
    for (std::size_t k = 0; k < va.size(); ++k) CHECK(va[k] == doctest::Approx(vb[k]));
  }
}

TEST_CASE("factor expansion") {
  TermSpec t = make_term(TermKind::nodefactor, "region");
  std::vector<std::string> ten;
  for (int r = 1; r <= 10; ++r) ten.push_back(fmt::format("R{:02}", r));
  ten.push_back("R04");
  const auto labels = expand_factor_levels(t, ten);
  CHECK(labels.size() == 9);
  CHECK(std::find(labels.begin(), labels.end(), "nodefactor.region.R04") == labels.end());
  CHECK(std::is_sorted(labels.begin(), labels.end()));

  const std::vector<std::string> two{"x", "y", "y"};
  CHECK(expand_factor_levels(t, two) == std::vector<std::string>{"nodefactor.region.x"});

  std::vector<std::string> warnings;
  const std::vector<std::string> one{"z", "z"};
  CHECK(expand_factor_levels(t, one, &warnings).empty());
  CHECK(warnings.size() == 1);

  t.reference_level = "x";
  CHECK(expand_factor_levels(t, two) == std::vector<std::string>{"nodefactor.region.y"});
  t.reference_level = "q";
  CHECK_THROWS(expand_factor_levels(t, two));

  const std::vector<std::string> tie{"b", "a", "b", "a"};
  CHECK(default_reference_level(tie) == "a");
}

TEST_CASE("model validation") {
  ModelData d = plain(4);
  ModelSpec valued_in_binary = single(TermKind::sum);
  CHECK_THROWS(Model(valued_in_binary, d));
  ModelSpec binary_in_valued = single(TermKind::gwesp, 0.5, ModelMode::valued, 3);
  CHECK_THROWS(Model(binary_in_valued, d));
  CHECK_THROWS(Model(single(TermKind::gwdegree, 0.0), d));
  CHECK_THROWS(Model(single(TermKind::gwdegree, -1.0), d));
  ModelSpec missing;
  missing.terms = {make_term(TermKind::nodecov, "libdem")};
  CHECK_THROWS(Model(missing, d));
  ModelSpec dup;
  dup.terms = {make_term(TermKind::edges), make_term(TermKind::edges)};
  CHECK_THROWS(Model(dup, d));
  CHECK_THROWS(Model(single(TermKind::memory_lag), d));

  const Model binary(single(TermKind::edges), d);
  CHECK_THROWS(binary.statistics(ValuedNetwork(numbered_nodes(4))));
  CHECK_THROWS(binary.statistics(BinaryNetwork(5)));
}

TEST_CASE("valued models put sum and nonzero first") {
  ModelData d = plain(4);
  d.attributes.numeric["x"] = {0.1, 0.2, 0.3, 0.4};
  ModelSpec s;
  s.mode = ModelMode::valued;
  s.max_value = 3;
  s.terms = {make_term(TermKind::absdiff, "x"), make_term(TermKind::nonzero),
             make_term(TermKind::nodesqrtcovar), make_term(TermKind::sum)};
  const Model m(s, d);
  CHECK(m.labels() == std::vector<std::string>{"nonzero", "sum", "absdiff.x", "nodesqrtcovar"});
  CHECK_FALSE(m.dyad_independent());
}

TEST_CASE("term names parse") {
  for (auto kind : {TermKind::edges, TermKind::gwesp, TermKind::nodesqrtcovar,
                    TermKind::memory_lag, TermKind::time_trend})
    CHECK(parse_term_kind(to_string(kind)) == kind);
  CHECK(parse_term_kind("transitive.weights") == TermKind::transitiveweights);
  CHECK_THROWS(parse_term_kind("kstar"));
}
