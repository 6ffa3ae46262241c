#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "collabnet/graph.hpp"
#include "collabnet/rng.hpp"
#include "collabnet/terms.hpp"

namespace collabnet {

enum class Proposal {
  /// Binary: with probability 1/2 toggle off a random existing tie,
  /// otherwise toggle a uniformly chosen dyad.
  tie_no_tie,
  /// Binary: toggle a uniformly chosen dyad.
  uniform_dyad,
  /// Valued: uniform dyad, new value uniform over {0..m} minus current.
  uniform_value,
  /// Valued: uniform dyad, value moved by +1 or -1 (rejected at the bounds).
  plus_minus_one,
};

std::string_view to_string(Proposal p);
Proposal parse_proposal(std::string_view name);

struct SamplerConfig {
  std::size_t burn_in = 10000;
  std::size_t interval = 100;
  std::size_t sample_count = 1000;
  std::uint64_t seed = 0;
  /// Defaults: tie_no_tie for binary, uniform_value for valued.
  std::optional<Proposal> proposal;
  bool keep_networks = false;
  /// Independent chains; samples are split evenly and concatenated in
  /// chain order. Each chain runs its own burn-in.
  std::size_t chains = 1;
  std::size_t threads = 1;
  /// Full recomputation of tracked statistics every this many steps.
  std::size_t resync_interval = 100000;
};

void validate(const SamplerConfig& config);

struct SampleBatch {
  /// sample_count x p statistic matrix g(y) of the retained draws.
  Eigen::MatrixXd statistics;
  std::vector<BinaryNetwork> binary_networks;
  std::vector<ValuedNetwork> valued_networks;
  double acceptance_rate = 0.0;
  std::uint64_t steps = 0;
};

/// Metropolis-Hastings chain over simple graphs for one model. Tracks g(y)
/// incrementally.
class BinaryChain {
 public:
  BinaryChain(const Model& model, std::span<const double> theta, BinaryNetwork start,
              Proposal proposal, std::uint64_t seed, std::size_t resync_interval = 100000);

  /// Runs `steps` proposals; returns how many were accepted.
  std::uint64_t run(std::uint64_t steps);

  const BinaryNetwork& network() const noexcept { return net_; }
  const std::vector<double>& statistics() const noexcept { return stats_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t accepted() const noexcept { return accepted_; }

 private:
  bool step();
  void add_edge_index(std::size_t i, std::size_t j);
  void remove_edge_index(std::size_t i, std::size_t j);

  const Model& model_;
  std::vector<double> theta_;
  BinaryNetwork net_;
  Proposal proposal_;
  Rng rng_;
  std::size_t resync_interval_;
  std::vector<double> stats_;
  std::vector<double> delta_;
  // Edge list with a dyad->slot index for O(1) tie selection and removal.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::vector<std::int64_t> slot_;
  std::uint64_t steps_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Metropolis-Hastings chain over {0..m}^dyads with the binomial reference
/// measure prod C(m, y_ij).
class ValuedChain {
 public:
  ValuedChain(const Model& model, std::span<const double> theta, ValuedNetwork start,
              Proposal proposal, std::uint64_t seed, std::size_t resync_interval = 100000);

  std::uint64_t run(std::uint64_t steps);

  const ValuedNetwork& network() const noexcept { return net_; }
  const std::vector<double>& statistics() const noexcept { return stats_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t accepted() const noexcept { return accepted_; }

 private:
  bool step();

  const Model& model_;
  std::vector<double> theta_;
  ValuedNetwork net_;
  Proposal proposal_;
  Rng rng_;
  std::size_t resync_interval_;
  std::vector<double> stats_;
  std::vector<double> delta_;
  std::vector<double> log_binomial_;
  std::uint64_t steps_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Samples from P(y) proportional to exp(theta' g(y)) starting at `start`.
SampleBatch sample_binary(const Model& model, std::span<const double> theta,
                          const BinaryNetwork& start, const SamplerConfig& config);
/// Same, starting from the empty graph on n nodes.
SampleBatch sample_binary(const Model& model, std::span<const double> theta, std::size_t n,
                          const SamplerConfig& config);

/// Samples from P(y) proportional to prod C(m, y_ij) exp(theta' g(y)).
SampleBatch sample_valued(const Model& model, std::span<const double> theta,
                          const ValuedNetwork& start, const SamplerConfig& config);
/// Same, starting from the all-zero network on n nodes.
SampleBatch sample_valued(const Model& model, std::span<const double> theta, std::size_t n,
                          const SamplerConfig& config);

/// Exact moments by summation over the whole state space.
struct ExactMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double log_normalizer = 0.0;
  std::uint64_t states = 0;
};

inline constexpr std::uint64_t kMaxEnumeratedStates = 10'000'000;

/// Binary mode needs n <= 6; valued mode needs (m+1)^C(n,2) <= 1e7.
/// Throws std::length_error when the state space is too large.
ExactMoments enumerate_exact(const Model& model, std::span<const double> theta, std::size_t n);

/// Exact probability of every state, indexed by state_index.
std::vector<double> exact_distribution(const Model& model, std::span<const double> theta,
                                       std::size_t n);

/// Mixed-radix code of a state: dyads (0,1),(0,2),...,(n-2,n-1) are digits,
/// least significant first.
std::uint64_t state_index(const BinaryNetwork& net);
std::uint64_t state_index(const ValuedNetwork& net, Weight max_value);

}  // namespace collabnet
