#include "collabnet/sampler.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "collabnet/parallel.hpp"

namespace collabnet {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<double> checked_theta(const Model& model, std::span<const double> theta) {
  if (theta.size() != model.dimension()) {
    throw std::invalid_argument(fmt::format("theta has {} entries, model has {} statistics",
                                            theta.size(), model.dimension()));
  }
  for (double t : theta)
    if (!std::isfinite(t)) throw std::invalid_argument("theta has a non-finite entry");
  return {theta.begin(), theta.end()};
}

bool accept(Rng& rng, double log_ratio) {
  if (log_ratio >= 0.0) return true;
  return uniform01(rng) < std::exp(log_ratio);
}

std::pair<std::size_t, std::size_t> random_dyad(Rng& rng, std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform_index(rng, n));
  auto j = static_cast<std::size_t>(uniform_index(rng, n - 1));
  if (j >= i) ++j;
  return {std::min(i, j), std::max(i, j)};
}

double log_choose(Weight m, Weight k) {
  return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
}

}  // namespace

std::string_view to_string(Proposal p) {
  switch (p) {
    case Proposal::tie_no_tie: return "tie_no_tie";
    case Proposal::uniform_dyad: return "uniform_dyad";
    case Proposal::uniform_value: return "uniform_value";
    case Proposal::plus_minus_one: return "plus_minus_one";
  }
  return "unknown";
}

Proposal parse_proposal(std::string_view name) {
  for (auto p : {Proposal::tie_no_tie, Proposal::uniform_dyad, Proposal::uniform_value,
                 Proposal::plus_minus_one})
    if (to_string(p) == name) return p;
  throw std::invalid_argument("unknown proposal '" + std::string(name) + "'");
}

void validate(const SamplerConfig& config) {
  if (config.interval < 1) throw std::invalid_argument("sampler interval must be >= 1");
  if (config.sample_count < 1) throw std::invalid_argument("sampler sample_count must be >= 1");
  if (config.chains < 1) throw std::invalid_argument("sampler needs at least one chain");
  if (config.resync_interval < 1) throw std::invalid_argument("resync interval must be >= 1");
}

// BinaryChain

BinaryChain::BinaryChain(const Model& model, std::span<const double> theta, BinaryNetwork start,
                         Proposal proposal, std::uint64_t seed, std::size_t resync_interval)
    : model_(model),
      theta_(checked_theta(model, theta)),
      net_(std::move(start)),
      proposal_(proposal),
      rng_(seed),
      resync_interval_(resync_interval),
      stats_(model.statistics(net_)),
      delta_(model.dimension(), 0.0),
      slot_(net_.size() * net_.size(), -1) {
  if (proposal_ != Proposal::tie_no_tie && proposal_ != Proposal::uniform_dyad) {
    throw std::invalid_argument("binary chains need the tie_no_tie or uniform_dyad proposal");
  }
  for (std::size_t i = 0; i < net_.size(); ++i)
    for (std::size_t j : net_.neighbors(i))
      if (j > i) add_edge_index(i, j);
}

void BinaryChain::add_edge_index(std::size_t i, std::size_t j) {
  slot_[i * net_.size() + j] = static_cast<std::int64_t>(edges_.size());
  edges_.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
}

void BinaryChain::remove_edge_index(std::size_t i, std::size_t j) {
  const std::size_t n = net_.size();
  const auto slot = static_cast<std::size_t>(slot_[i * n + j]);
  const auto last = edges_.back();
  edges_[slot] = last;
  slot_[static_cast<std::size_t>(last.first) * n + last.second] = static_cast<std::int64_t>(slot);
  edges_.pop_back();
  slot_[i * n + j] = -1;
}

bool BinaryChain::step() {
  const std::size_t n = net_.size();
  const double dyads = static_cast<double>(dyad_count(n));
  std::size_t i = 0;
  std::size_t j = 0;
  if (proposal_ == Proposal::tie_no_tie && !edges_.empty() && uniform01(rng_) < 0.5) {
    const auto& e = edges_[uniform_index(rng_, edges_.size())];
    i = e.first;
    j = e.second;
  } else {
    std::tie(i, j) = random_dyad(rng_, n);
  }
  const bool present = net_.has_edge(i, j);
  model_.change_binary(net_, i, j, delta_);
  double log_ratio = present ? -dot(theta_, delta_) : dot(theta_, delta_);
  if (proposal_ == Proposal::tie_no_tie) {
    const double ties = static_cast<double>(edges_.size());
    double forward = 0.0;
    double reverse = 0.0;
    if (present) {
      forward = 0.5 / ties + 0.5 / dyads;
      reverse = ties - 1.0 > 0.0 ? 0.5 / dyads : 1.0 / dyads;
    } else {
      forward = ties > 0.0 ? 0.5 / dyads : 1.0 / dyads;
      reverse = 0.5 / (ties + 1.0) + 0.5 / dyads;
    }
    log_ratio += std::log(reverse / forward);
  }
  if (!accept(rng_, log_ratio)) return false;
  net_.toggle(i, j);
  const double sign = present ? -1.0 : 1.0;
  for (std::size_t k = 0; k < stats_.size(); ++k) stats_[k] += sign * delta_[k];
  if (present) {
    remove_edge_index(i, j);
  } else {
    add_edge_index(i, j);
  }
  return true;
}

std::uint64_t BinaryChain::run(std::uint64_t steps) {
  if (net_.size() < 2) {
    steps_ += steps;
    return 0;
  }
  std::uint64_t accepted = 0;
  for (std::uint64_t s = 0; s < steps; ++s) {
    accepted += step();
    if (++steps_ % resync_interval_ == 0) stats_ = model_.statistics(net_);
  }
  accepted_ += accepted;
  return accepted;
}

// ValuedChain

ValuedChain::ValuedChain(const Model& model, std::span<const double> theta, ValuedNetwork start,
                         Proposal proposal, std::uint64_t seed, std::size_t resync_interval)
    : model_(model),
      theta_(checked_theta(model, theta)),
      net_(std::move(start)),
      proposal_(proposal),
      rng_(seed),
      resync_interval_(resync_interval),
      stats_(model.statistics(net_)),
      delta_(model.dimension(), 0.0) {
  if (proposal_ != Proposal::uniform_value && proposal_ != Proposal::plus_minus_one) {
    throw std::invalid_argument("valued chains need the uniform_value or plus_minus_one proposal");
  }
  const Weight m = model.max_value();
  log_binomial_.resize(m + 1);
  for (Weight k = 0; k <= m; ++k) log_binomial_[k] = log_choose(m, k);
}

bool ValuedChain::step() {
  const Weight m = model_.max_value();
  const auto [i, j] = random_dyad(rng_, net_.size());
  const Weight w = net_.weight(i, j);
  Weight v = 0;
  if (proposal_ == Proposal::uniform_value) {
    const auto r = static_cast<Weight>(uniform_index(rng_, m));
    v = r < w ? r : r + 1;
  } else {
    const bool up = uniform01(rng_) < 0.5;
    if (up ? w == m : w == 0) return false;
    v = up ? w + 1 : w - 1;
  }
  model_.delta_valued(net_, i, j, v, delta_);
  const double log_ratio = dot(theta_, delta_) + log_binomial_[v] - log_binomial_[w];
  if (!accept(rng_, log_ratio)) return false;
  net_.set_weight(i, j, v);
  for (std::size_t k = 0; k < stats_.size(); ++k) stats_[k] += delta_[k];
  return true;
}

std::uint64_t ValuedChain::run(std::uint64_t steps) {
  if (net_.size() < 2) {
    steps_ += steps;
    return 0;
  }
  std::uint64_t accepted = 0;
  for (std::uint64_t s = 0; s < steps; ++s) {
    accepted += step();
    if (++steps_ % resync_interval_ == 0) stats_ = model_.statistics(net_);
  }
  accepted_ += accepted;
  return accepted;
}

// Batches

namespace {

template <typename Chain, typename Network>
SampleBatch run_chains(const Model& model, std::span<const double> theta, const Network& start,
                       const SamplerConfig& config, Proposal proposal) {
  validate(config);
  const std::size_t chains = std::min(config.chains, config.sample_count);
  struct ChainOutput {
    std::vector<std::vector<double>> stats;
    std::vector<Network> networks;
    std::uint64_t steps = 0;
    std::uint64_t accepted = 0;
  };
  std::vector<ChainOutput> outputs(chains);
  parallel_for(chains, config.threads, [&](std::size_t c) {
    const std::size_t count =
        config.sample_count / chains + (c < config.sample_count % chains ? 1 : 0);
    Chain chain(model, theta, start, proposal, derive_seed(config.seed, c), config.resync_interval);
    chain.run(config.burn_in);
    auto& out = outputs[c];
    out.stats.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
      chain.run(config.interval);
      out.stats.push_back(chain.statistics());
      if (config.keep_networks) out.networks.push_back(chain.network());
    }
    out.steps = chain.steps();
    out.accepted = chain.accepted();
  });

  SampleBatch batch;
  batch.statistics.resize(static_cast<Eigen::Index>(config.sample_count),
                          static_cast<Eigen::Index>(model.dimension()));
  Eigen::Index row = 0;
  std::uint64_t accepted = 0;
  for (auto& out : outputs) {
    for (const auto& s : out.stats) {
      for (std::size_t k = 0; k < s.size(); ++k) batch.statistics(row, static_cast<Eigen::Index>(k)) = s[k];
      ++row;
    }
    for (auto& net : out.networks) {
      if constexpr (std::is_same_v<Network, BinaryNetwork>) {
        batch.binary_networks.push_back(std::move(net));
      } else {
        batch.valued_networks.push_back(std::move(net));
      }
    }
    batch.steps += out.steps;
    accepted += out.accepted;
  }
  batch.acceptance_rate =
      batch.steps == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(batch.steps);
  return batch;
}

}  // namespace

SampleBatch sample_binary(const Model& model, std::span<const double> theta,
                          const BinaryNetwork& start, const SamplerConfig& config) {
  checked_theta(model, theta);
  if (model.mode() != ModelMode::binary) {
    throw std::invalid_argument("sample_binary needs a binary-mode model");
  }
  const Proposal p = config.proposal.value_or(Proposal::tie_no_tie);
  return run_chains<BinaryChain>(model, theta, start, config, p);
}

SampleBatch sample_binary(const Model& model, std::span<const double> theta, std::size_t n,
                          const SamplerConfig& config) {
  return sample_binary(model, theta, BinaryNetwork(n), config);
}

SampleBatch sample_valued(const Model& model, std::span<const double> theta,
                          const ValuedNetwork& start, const SamplerConfig& config) {
  checked_theta(model, theta);
  if (model.mode() != ModelMode::valued) {
    throw std::invalid_argument("sample_valued needs a valued-mode model");
  }
  const Proposal p = config.proposal.value_or(Proposal::uniform_value);
  return run_chains<ValuedChain>(model, theta, start, config, p);
}

SampleBatch sample_valued(const Model& model, std::span<const double> theta, std::size_t n,
                          const SamplerConfig& config) {
  return sample_valued(model, theta, ValuedNetwork(numbered_nodes(n)), config);
}

// Exact enumeration

namespace {

std::uint64_t state_space_size(const Model& model, std::size_t n) {
  const std::size_t dyads = dyad_count(n);
  if (model.mode() == ModelMode::binary) {
    if (n > 6) throw std::length_error(fmt::format("binary enumeration needs n <= 6, got {}", n));
    return std::uint64_t{1} << dyads;
  }
  const double radix = static_cast<double>(model.max_value()) + 1.0;
  if (std::pow(radix, static_cast<double>(dyads)) > static_cast<double>(kMaxEnumeratedStates)) {
    throw std::length_error(fmt::format("valued state space ({}^{}) exceeds {} states", radix,
                                        dyads, kMaxEnumeratedStates));
  }
  std::uint64_t states = 1;
  for (std::size_t d = 0; d < dyads; ++d) states *= model.max_value() + 1;
  return states;
}

/// Calls f(log unnormalized probability, statistics) for every state in
/// state_index order.
template <typename F>
void for_each_state(const Model& model, std::span<const double> theta, std::size_t n, F&& f) {
  const std::uint64_t states = state_space_size(model, n);
  const auto th = checked_theta(model, theta);
  if (model.mode() == ModelMode::binary) {
    for (std::uint64_t s = 0; s < states; ++s) {
      BinaryNetwork net(n);
      std::uint64_t code = s;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, code >>= 1)
          if (code & 1U) net.set_edge(i, j, true);
      const auto g = model.statistics(net);
      f(dot(th, g), g);
    }
    return;
  }
  const Weight m = model.max_value();
  std::vector<double> log_binomial(m + 1);
  for (Weight k = 0; k <= m; ++k) log_binomial[k] = log_choose(m, k);
  for (std::uint64_t s = 0; s < states; ++s) {
    ValuedNetwork net(numbered_nodes(n));
    std::uint64_t code = s;
    double log_reference = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto v = static_cast<Weight>(code % (m + 1));
        code /= m + 1;
        if (v) net.set_weight(i, j, v);
        log_reference += log_binomial[v];
      }
    }
    const auto g = model.statistics(net);
    f(dot(th, g) + log_reference, g);
  }
}

}  // namespace

ExactMoments enumerate_exact(const Model& model, std::span<const double> theta, std::size_t n) {
  const auto p = static_cast<Eigen::Index>(model.dimension());
  // Running log-sum-exp with sums rescaled whenever the maximum moves;
  // statistics are shifted by the first state's vector for stability.
  double max_log = -std::numeric_limits<double>::infinity();
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd shift;
  std::uint64_t states = 0;
  for_each_state(model, theta, n, [&](double log_w, const std::vector<double>& g) {
    Eigen::Map<const Eigen::VectorXd> gv(g.data(), p);
    if (states == 0) shift = gv;
    ++states;
    if (log_w > max_log) {
      const double rescale = std::exp(max_log - log_w);
      s0 *= rescale;
      s1 *= rescale;
      s2 *= rescale;
      max_log = log_w;
    }
    const double w = std::exp(log_w - max_log);
    const Eigen::VectorXd c = gv - shift;
    s0 += w;
    s1 += w * c;
    s2.noalias() += w * c * c.transpose();
  });
  ExactMoments out;
  out.states = states;
  const Eigen::VectorXd centered_mean = s1 / s0;
  out.mean = centered_mean + shift;
  out.covariance = s2 / s0 - centered_mean * centered_mean.transpose();
  out.log_normalizer = max_log + std::log(s0);
  return out;
}

std::vector<double> exact_distribution(const Model& model, std::span<const double> theta,
                                       std::size_t n) {
  std::vector<double> log_w;
  for_each_state(model, theta, n,
                 [&](double lw, const std::vector<double>&) { log_w.push_back(lw); });
  const double max_log = *std::max_element(log_w.begin(), log_w.end());
  double total = 0.0;
  for (double& lw : log_w) {
    lw = std::exp(lw - max_log);
    total += lw;
  }
  for (double& p : log_w) p /= total;
  return log_w;
}

std::uint64_t state_index(const BinaryNetwork& net) {
  std::uint64_t code = 0;
  std::uint64_t bit = 1;
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j, bit <<= 1)
      if (net.has_edge(i, j)) code |= bit;
  return code;
}

std::uint64_t state_index(const ValuedNetwork& net, Weight max_value) {
  std::uint64_t code = 0;
  std::uint64_t place = 1;
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j, place *= max_value + 1)
      code += place * net.weight(i, j);
  return code;
}

}  // namespace collabnet
