#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "collabnet/graph.hpp"
#include "collabnet/sampler.hpp"
#include "collabnet/terms.hpp"

namespace collabnet {

/// Raised when simulated statistics cannot support estimation (a statistic
/// never varies in the sample yet differs from its observed value).
class DegenerateModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NewtonOptions {
  double gradient_tolerance = 1e-8;
  std::size_t max_iterations = 100;
};

struct FitResult {
  std::string method;
  std::vector<std::string> labels;
  Eigen::VectorXd coefficients;
  /// Empty when the method does not produce standard errors.
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd p_values;
  bool converged = false;
  std::size_t iterations = 0;
  /// A ridge term was added to a singular Hessian / covariance.
  bool ridge = false;
  /// The optimum lies at infinity (perfect separation or boundary MLE).
  bool separation = false;
  std::string diagnostic;

  // MC-MLE only.
  Eigen::VectorXd observed_statistics;
  Eigen::VectorXd t_ratios;
  std::size_t sample_size = 0;
  double acceptance_rate = 0.0;
  /// Statistics simulated at the final estimate (for VIF).
  Eigen::MatrixXd sample_statistics;
};

/// Two-sided Wald p-value of estimate/se under N(0,1).
double wald_p_value(double estimate, double standard_error);
/// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, "" otherwise.
std::string significance_stars(double p);

/// Dyad-level logistic regression data: one row per dyad with its change
/// statistics and observed tie indicator. Optional row weights.
struct LogisticDesign {
  Eigen::MatrixXd predictors;
  Eigen::VectorXd response;
  Eigen::VectorXd weights;
};

LogisticDesign mple_design(const Model& model, const BinaryNetwork& net);

/// Newton-Raphson maximization of the weighted logistic log-likelihood.
FitResult fit_logistic(const LogisticDesign& design, std::vector<std::string> labels,
                       const NewtonOptions& options = {});

/// Maximum pseudolikelihood for a binary model.
FitResult fit_mple(const Model& model, const BinaryNetwork& net, const NewtonOptions& options = {});

/// Exact MLE by Newton on the exactly enumerated log-likelihood (binary:
/// n <= 6; valued: enumerable state space). Flags divergence when the
/// observed statistics sit on the boundary of their support.
FitResult exact_mle_small(const Model& model, const BinaryNetwork& observed,
                          const NewtonOptions& options = {});
FitResult exact_mle_small(const Model& model, const ValuedNetwork& observed,
                          const NewtonOptions& options = {});

// Temporal models

/// Inputs of one modeled transition: the network at t and its model data
/// with the lag (network at t-1) and the 1-based period index filled in.
struct TergmPeriod {
  BinaryNetwork network;
  ModelData data;
};

/// Builds the T-1 modeled periods from a binary series and per-year data.
/// data[t] supplies attributes/covariates for series[t]; its lag and time
/// index are overwritten.
std::vector<TergmPeriod> tergm_periods(std::span<const BinaryNetwork> series,
                                       std::span<const ModelData> data);

struct BootstrapOptions {
  std::size_t replications = 1500;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double confidence = 0.95;
  NewtonOptions newton;
};

struct BootstrapResult {
  std::vector<std::string> labels;
  /// Pooled MPLE over all modeled periods.
  FitResult point;
  /// Kept replicates x p.
  Eigen::MatrixXd replicates;
  Eigen::VectorXd mean;
  Eigen::VectorXd ci_low;
  Eigen::VectorXd ci_high;
  /// True iff the confidence interval excludes 0.
  std::vector<bool> significant;
  std::size_t dropped = 0;
  std::size_t periods = 0;
};

/// Bootstrapped pooled pseudolikelihood over periods t = 2..T. Replicates
/// resample the modeled periods with replacement and refit; failed refits
/// are dropped and counted.
BootstrapResult fit_tergm_bootstrap(const ModelSpec& spec, std::span<const TergmPeriod> periods,
                                    const BootstrapOptions& options);
BootstrapResult fit_tergm_bootstrap(const ModelSpec& spec, std::span<const BinaryNetwork> series,
                                    std::span<const ModelData> data,
                                    const BootstrapOptions& options);

/// Type-7 (linear interpolation) sample quantile.
double quantile(std::vector<double> values, double q);

// Valued models

/// Pseudolikelihood for valued models: each dyad's value given the rest is
/// categorical over {0..m} with weights C(m, v) exp(theta' delta(v)).
FitResult fit_valued_mple(const Model& model, const ValuedNetwork& net,
                          const NewtonOptions& options = {});

struct McmleOptions {
  std::size_t samples = 15000;
  /// 0 selects 10 * dyads.
  std::size_t burn_in = 0;
  /// 0 selects the number of dyads.
  std::size_t interval = 0;
  double step_max = 0.5;
  double t_tolerance = 0.1;
  std::size_t max_iterations = 60;
  std::size_t max_doublings = 4;
  std::uint64_t seed = 0;
  std::size_t chains = 1;
  std::size_t threads = 1;
};

/// Monte-Carlo MLE (Geyer-Thompson with the log-normal approximation) for a
/// valued model with binomial reference, started at the valued MPLE.
FitResult fit_vergm_mcmle(const Model& model, const ValuedNetwork& observed,
                          const McmleOptions& options = {});

/// Variance inflation per statistic: diagonal of the inverse correlation
/// matrix of the sampled statistics. Statistics that are exact linear
/// combinations of others (or constant) get +infinity.
Eigen::VectorXd vif_diagnostics(const Eigen::MatrixXd& statistics);

}  // namespace collabnet
