#include "collabnet/estimation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "collabnet/parallel.hpp"
#include "collabnet/rng.hpp"

namespace collabnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log1p_exp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  /// Negative Hessian.
  Eigen::MatrixXd information;
};

struct NewtonOutcome {
  Eigen::VectorXd theta;
  Eigen::MatrixXd information;
  bool converged = false;
  bool ridge = false;
  std::size_t iterations = 0;
};

double reciprocal_condition(const Eigen::MatrixXd& information) {
  if (information.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(information, Eigen::EigenvaluesOnly);
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  if (!(hi > 0)) return 0.0;
  return std::max(lo, 0.0) / hi;
}

constexpr double kPinnedEta = 15.0;

std::vector<Eigen::Index> all_rows(Eigen::Index rows, const Eigen::VectorXd& w) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index r = 0; r < rows; ++r)
    if (w[r] != 0.0) out.push_back(r);
  return out;
}

/// Numerical rank of the selected rows with columns scaled to unit norm.
Eigen::Index design_rank(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) sub.row(static_cast<Eigen::Index>(k)) = X.row(rows[k]);
  for (Eigen::Index c = 0; c < sub.cols(); ++c) {
    const double norm = sub.col(c).norm();
    if (norm > 0) sub.col(c) /= norm;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  qr.setThreshold(1e-9);
  return qr.rank();
}

/// Solves information * x = rhs, adding a ridge when the matrix is not
/// numerically positive definite.
Eigen::VectorXd solve_information(const Eigen::MatrixXd& information, const Eigen::VectorXd& rhs,
                                  bool& ridge) {
  if (reciprocal_condition(information) > 1e-13) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
    if (ldlt.info() == Eigen::Success) return ldlt.solve(rhs);
  }
  ridge = true;
  const double scale = std::max(information.diagonal().cwiseAbs().maxCoeff(), 1.0);
  Eigen::MatrixXd regularized = information;
  regularized.diagonal().array() += 1e-8 * scale;
  return regularized.ldlt().solve(rhs);
}

template <typename Full, typename Value>
NewtonOutcome newton_maximize(Full&& full, Value&& value, Eigen::VectorXd theta,
                              const NewtonOptions& options) {
  NewtonOutcome out;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    Evaluation e = full(theta);
    out.information = e.information;
    if (e.gradient.size() == 0 || e.gradient.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd step = solve_information(e.information, e.gradient, out.ridge);
    double scale = 1.0;
    Eigen::VectorXd candidate = theta + step;
    double candidate_value = value(candidate);
    const double slack = 1e-12 * std::max(1.0, std::abs(e.value));
    while (!(candidate_value >= e.value - slack) && scale > 1e-10) {
      scale *= 0.5;
      candidate = theta + scale * step;
      candidate_value = value(candidate);
    }
    if (!(candidate_value >= e.value - slack)) break;
    theta = candidate;
  }
  out.theta = std::move(theta);
  if (!out.converged) out.information = full(out.theta).information;
  return out;
}

Eigen::VectorXd standard_errors(const Eigen::MatrixXd& information) {
  bool ridge = false;
  const auto p = information.rows();
  Eigen::MatrixXd inverse(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    inverse.col(k) = solve_information(information, Eigen::VectorXd::Unit(p, k), ridge);
  }
  return inverse.diagonal().cwiseMax(0.0).cwiseSqrt();
}

void fill_wald(FitResult& fit) {
  fit.p_values.resize(fit.coefficients.size());
  for (Eigen::Index k = 0; k < fit.coefficients.size(); ++k)
    fit.p_values[k] = wald_p_value(fit.coefficients[k], fit.standard_errors[k]);
}

}  // namespace

double wald_p_value(double estimate, double standard_error) {
  if (!(standard_error > 0) || !std::isfinite(standard_error)) return 1.0;
  return std::erfc(std::abs(estimate / standard_error) / std::sqrt(2.0));
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

// Logistic pseudolikelihood

LogisticDesign mple_design(const Model& model, const BinaryNetwork& net) {
  const std::size_t n = net.size();
  const auto rows = static_cast<Eigen::Index>(dyad_count(n));
  const auto p = static_cast<Eigen::Index>(model.dimension());
  LogisticDesign d;
  d.predictors.resize(rows, p);
  d.response.resize(rows);
  d.weights = Eigen::VectorXd::Ones(rows);
  std::vector<double> delta(model.dimension());
  Eigen::Index r = 0;
  model.statistics(net);  // validates the network against the model
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++r) {
      model.change_binary(net, i, j, delta);
      for (Eigen::Index k = 0; k < p; ++k) d.predictors(r, k) = delta[static_cast<std::size_t>(k)];
      d.response[r] = net.has_edge(i, j) ? 1.0 : 0.0;
    }
  }
  return d;
}

FitResult fit_logistic(const LogisticDesign& design, std::vector<std::string> labels,
                       const NewtonOptions& options) {
  const Eigen::MatrixXd& X = design.predictors;
  const Eigen::VectorXd& y = design.response;
  const Eigen::VectorXd w =
      design.weights.size() == y.size() ? design.weights : Eigen::VectorXd::Ones(y.size());
  const auto p = X.cols();
  FitResult fit;
  fit.method = "mple";
  fit.labels = std::move(labels);

  double ones = 0.0;
  double total = 0.0;
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    ones += w[r] * y[r];
    total += w[r];
  }
  if (total <= 0.0 || ones <= 0.0 || ones >= total) {
    fit.coefficients = Eigen::VectorXd::Zero(p);
    fit.standard_errors = Eigen::VectorXd::Constant(p, kInf);
    fit.p_values = Eigen::VectorXd::Ones(p);
    fit.separation = true;
    fit.diagnostic = ones <= 0.0 ? "perfect separation: no ties among the modeled dyads"
                                 : "perfect separation: every modeled dyad is tied";
    return fit;
  }

  auto value = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd eta = X * theta;
    double ll = 0.0;
    for (Eigen::Index r = 0; r < eta.size(); ++r)
      if (w[r] != 0.0) ll += w[r] * (y[r] * eta[r] - log1p_exp(eta[r]));
    return ll;
  };
  auto full = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd eta = X * theta;
    Evaluation e;
    Eigen::VectorXd residual(eta.size());
    Eigen::VectorXd curvature(eta.size());
    e.value = 0.0;
    for (Eigen::Index r = 0; r < eta.size(); ++r) {
      const double prob = logistic(eta[r]);
      residual[r] = w[r] * (y[r] - prob);
      curvature[r] = w[r] * prob * (1.0 - prob);
      if (w[r] != 0.0) e.value += w[r] * (y[r] * eta[r] - log1p_exp(eta[r]));
    }
    e.gradient = X.transpose() * residual;
    e.information = X.transpose() * curvature.asDiagonal() * X;
    return e;
  };

  NewtonOutcome outcome = newton_maximize(full, value, Eigen::VectorXd::Zero(p), options);
  fit.coefficients = outcome.theta;
  fit.iterations = outcome.iterations;
  fit.converged = outcome.converged;
  fit.ridge = outcome.ridge;
  fit.standard_errors = standard_errors(outcome.information);
  fill_wald(fit);

  // Rows whose fitted probability is pinned at 0/1 carry no curvature. If
  // dropping them loses rank, some direction improves the likelihood without
  // bound on those rows alone: the optimum is at infinity.
  const Eigen::VectorXd eta = X * outcome.theta;
  std::vector<Eigen::Index> active;
  std::size_t weighted = 0;
  for (Eigen::Index r = 0; r < eta.size(); ++r) {
    if (w[r] == 0.0) continue;
    ++weighted;
    if (std::abs(eta[r]) < kPinnedEta) active.push_back(r);
  }
  const bool pinned = active.size() < weighted &&
                      design_rank(X, active) < design_rank(X, all_rows(X.rows(), w));
  if (pinned) {
    fit.separation = true;
    fit.converged = false;
    fit.diagnostic = "perfect separation: fitted probabilities numerically 0 or 1";
  } else if (!fit.converged) {
    fit.diagnostic = fmt::format("no convergence after {} Newton iterations", fit.iterations);
  }
  if (fit.ridge && fit.diagnostic.empty()) {
    fit.diagnostic = "singular information matrix; ridge fallback applied";
  }
  return fit;
}

FitResult fit_mple(const Model& model, const BinaryNetwork& net, const NewtonOptions& options) {
  return fit_logistic(mple_design(model, net), model.labels(), options);
}

// Exact likelihood

namespace {

FitResult exact_mle_impl(const Model& model, const std::vector<double>& observed, std::size_t n,
                         const NewtonOptions& options) {
  const auto p = static_cast<Eigen::Index>(model.dimension());
  const Eigen::Map<const Eigen::VectorXd> g_obs(observed.data(), p);
  auto full = [&](const Eigen::VectorXd& theta) {
    const ExactMoments m = enumerate_exact(model, {theta.data(), static_cast<std::size_t>(p)}, n);
    Evaluation e;
    e.value = theta.dot(g_obs) - m.log_normalizer;
    e.gradient = g_obs - m.mean;
    e.information = m.covariance;
    return e;
  };
  auto value = [&](const Eigen::VectorXd& theta) {
    if (theta.cwiseAbs().maxCoeff() > 1e3) return -kInf;
    return full(theta).value;
  };
  NewtonOptions opts = options;
  opts.gradient_tolerance = std::min(opts.gradient_tolerance, 1e-9);
  const NewtonOutcome outcome = newton_maximize(full, value, Eigen::VectorXd::Zero(p), opts);

  FitResult fit;
  fit.method = "exact-mle";
  fit.labels = model.labels();
  fit.coefficients = outcome.theta;
  fit.iterations = outcome.iterations;
  fit.converged = outcome.converged;
  fit.ridge = outcome.ridge;
  fit.observed_statistics = g_obs;
  fit.standard_errors = standard_errors(outcome.information);
  fill_wald(fit);
  // On the boundary the fitted distribution collapses onto a face of the
  // support: some direction loses almost all of its variance relative to the
  // reference measure.
  const ExactMoments reference = enumerate_exact(model, std::vector<double>(observed.size(), 0.0), n);
  bool collapsed = false;
  Eigen::LDLT<Eigen::MatrixXd> base(reference.covariance);
  if (base.info() == Eigen::Success && reciprocal_condition(reference.covariance) > 1e-12) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        outcome.information, reference.covariance, Eigen::EigenvaluesOnly);
    collapsed = eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() < 1e-6;
  }
  if (collapsed) {
    fit.separation = true;
    fit.converged = false;
    fit.diagnostic = "divergent MLE: observed statistics lie on the boundary of their support";
  } else if (!fit.converged) {
    fit.diagnostic = "no convergence of exact Newton iterations";
  }
  return fit;
}

}  // namespace

FitResult exact_mle_small(const Model& model, const BinaryNetwork& observed,
                          const NewtonOptions& options) {
  return exact_mle_impl(model, model.statistics(observed), observed.size(), options);
}

FitResult exact_mle_small(const Model& model, const ValuedNetwork& observed,
                          const NewtonOptions& options) {
  return exact_mle_impl(model, model.statistics(observed), observed.size(), options);
}

// Temporal bootstrap

std::vector<TergmPeriod> tergm_periods(std::span<const BinaryNetwork> series,
                                       std::span<const ModelData> data) {
  if (series.size() < 2) throw std::invalid_argument("temporal models need at least two periods");
  if (data.size() != series.size()) {
    throw std::invalid_argument("need one ModelData per network in the series");
  }
  std::vector<TergmPeriod> out;
  for (std::size_t t = 1; t < series.size(); ++t) {
    if (series[t].nodes() != series[t - 1].nodes()) {
      throw std::invalid_argument("temporal series networks must share one node ordering");
    }
    TergmPeriod period{series[t], data[t]};
    period.data.lag = EdgeCovariateMatrix::from_network(series[t - 1], "memory");
    period.data.time_index = static_cast<int>(t);
    out.push_back(std::move(period));
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BootstrapResult fit_tergm_bootstrap(const ModelSpec& spec, std::span<const TergmPeriod> periods,
                                    const BootstrapOptions& options) {
  if (options.replications < 1) throw std::invalid_argument("bootstrap needs at least one replication");
  if (periods.empty()) throw std::invalid_argument("temporal bootstrap needs at least one modeled period");
  if (spec.mode != ModelMode::binary) throw std::invalid_argument("temporal models are binary");

  // Stack every period's dyad rows once; replicates only reweight periods.
  std::vector<LogisticDesign> designs;
  std::vector<std::string> labels;
  for (const auto& period : periods) {
    const Model model(spec, period.data);
    if (labels.empty()) {
      labels = model.labels();
    } else if (labels != model.labels()) {
      throw std::invalid_argument("periods expand to different statistics (factor levels differ)");
    }
    designs.push_back(mple_design(model, period.network));
  }
  const auto p = static_cast<Eigen::Index>(labels.size());
  Eigen::Index rows = 0;
  for (const auto& d : designs) rows += d.response.size();
  LogisticDesign pooled;
  pooled.predictors.resize(rows, p);
  pooled.response.resize(rows);
  pooled.weights = Eigen::VectorXd::Ones(rows);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
  Eigen::Index at = 0;
  for (const auto& d : designs) {
    pooled.predictors.middleRows(at, d.response.size()) = d.predictors;
    pooled.response.segment(at, d.response.size()) = d.response;
    blocks.emplace_back(at, d.response.size());
    at += d.response.size();
  }
  designs.clear();

  BootstrapResult result;
  result.labels = labels;
  result.periods = periods.size();
  result.point = fit_logistic(pooled, labels, options.newton);

  const std::size_t R = options.replications;
  std::vector<Eigen::VectorXd> estimates(R);
  std::vector<char> ok(R, 0);
  parallel_for(R, options.threads, [&](std::size_t r) {
    Rng rng = make_rng(options.seed, r);
    LogisticDesign replicate{pooled.predictors, pooled.response,
                             Eigen::VectorXd::Zero(pooled.response.size())};
    for (std::size_t draw = 0; draw < blocks.size(); ++draw) {
      const auto& [start, len] = blocks[uniform_index(rng, blocks.size())];
      replicate.weights.segment(start, len).array() += 1.0;
    }
    const FitResult fit = fit_logistic(replicate, labels, options.newton);
    if (fit.converged && !fit.separation && fit.coefficients.allFinite()) {
      estimates[r] = fit.coefficients;
      ok[r] = 1;
    }
  });

  const auto kept = static_cast<Eigen::Index>(std::count(ok.begin(), ok.end(), 1));
  result.dropped = R - static_cast<std::size_t>(kept);
  result.replicates.resize(kept, p);
  Eigen::Index row = 0;
  for (std::size_t r = 0; r < R; ++r)
    if (ok[r]) result.replicates.row(row++) = estimates[r].transpose();

  result.mean = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  result.ci_low = result.mean;
  result.ci_high = result.mean;
  result.significant.assign(static_cast<std::size_t>(p), false);
  if (kept == 0) return result;
  const double tail = (1.0 - options.confidence) / 2.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    std::vector<double> column(result.replicates.col(k).data(),
                               result.replicates.col(k).data() + kept);
    result.mean[k] = result.replicates.col(k).mean();
    result.ci_low[k] = quantile(column, tail);
    result.ci_high[k] = quantile(column, 1.0 - tail);
    result.significant[static_cast<std::size_t>(k)] = result.ci_low[k] > 0.0 || result.ci_high[k] < 0.0;
  }
  return result;
}

BootstrapResult fit_tergm_bootstrap(const ModelSpec& spec, std::span<const BinaryNetwork> series,
                                    std::span<const ModelData> data,
                                    const BootstrapOptions& options) {
  const auto periods = tergm_periods(series, data);
  return fit_tergm_bootstrap(spec, std::span<const TergmPeriod>(periods), options);
}

// Valued models

FitResult fit_valued_mple(const Model& model, const ValuedNetwork& net,
                          const NewtonOptions& options) {
  if (model.mode() != ModelMode::valued) throw std::invalid_argument("valued MPLE needs a valued model");
  const std::size_t n = net.size();
  const Weight m = model.max_value();
  const auto p = static_cast<Eigen::Index>(model.dimension());
  const auto levels = static_cast<Eigen::Index>(m + 1);
  const auto dyads = static_cast<Eigen::Index>(dyad_count(n));
  model.statistics(net);

  // Per dyad: rows v = 0..m of g(y_ij = v) - g(y_ij = 0).
  Eigen::MatrixXd contrasts(dyads * levels, p);
  std::vector<Weight> observed(static_cast<std::size_t>(dyads));
  std::vector<double> to_zero(static_cast<std::size_t>(p));
  std::vector<double> to_value(static_cast<std::size_t>(p));
  Eigen::Index d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++d) {
      observed[static_cast<std::size_t>(d)] = net.weight(i, j);
      model.delta_valued(net, i, j, 0, to_zero);
      for (Weight v = 0; v <= m; ++v) {
        model.delta_valued(net, i, j, v, to_value);
        for (Eigen::Index k = 0; k < p; ++k) {
          contrasts(d * levels + v, k) =
              to_value[static_cast<std::size_t>(k)] - to_zero[static_cast<std::size_t>(k)];
        }
      }
    }
  }
  Eigen::VectorXd log_reference(levels);
  for (Weight v = 0; v <= m; ++v)
    log_reference[v] = std::lgamma(m + 1.0) - std::lgamma(v + 1.0) - std::lgamma(m - v + 1.0);

  auto evaluate = [&](const Eigen::VectorXd& theta, bool derivatives) {
    Evaluation e;
    e.value = 0.0;
    if (derivatives) {
      e.gradient = Eigen::VectorXd::Zero(p);
      e.information = Eigen::MatrixXd::Zero(p, p);
    }
    const Eigen::VectorXd eta = contrasts * theta;
    Eigen::VectorXd prob(levels);
    for (Eigen::Index dd = 0; dd < dyads; ++dd) {
      const auto block = eta.segment(dd * levels, levels) + log_reference;
      const double top = block.maxCoeff();
      prob = (block.array() - top).exp();
      const double z = prob.sum();
      prob /= z;
      const Weight y = observed[static_cast<std::size_t>(dd)];
      e.value += block[y] - top - std::log(z);
      if (!derivatives) continue;
      const auto rows = contrasts.middleRows(dd * levels, levels);
      const Eigen::VectorXd mean = rows.transpose() * prob;
      e.gradient += rows.row(y).transpose() - mean;
      e.information += rows.transpose() * prob.asDiagonal() * rows - mean * mean.transpose();
    }
    return e;
  };
  auto full = [&](const Eigen::VectorXd& theta) { return evaluate(theta, true); };
  auto value = [&](const Eigen::VectorXd& theta) { return evaluate(theta, false).value; };
  const NewtonOutcome outcome = newton_maximize(full, value, Eigen::VectorXd::Zero(p), options);

  FitResult fit;
  fit.method = "valued-mple";
  fit.labels = model.labels();
  fit.coefficients = outcome.theta;
  fit.iterations = outcome.iterations;
  fit.converged = outcome.converged;
  fit.ridge = outcome.ridge;
  fit.standard_errors = standard_errors(outcome.information);
  fill_wald(fit);
  if (!fit.converged) fit.diagnostic = "valued MPLE did not converge";
  return fit;
}

FitResult fit_vergm_mcmle(const Model& model, const ValuedNetwork& observed,
                          const McmleOptions& options) {
  if (model.mode() != ModelMode::valued) throw std::invalid_argument("VERGM estimation needs a valued model");
  if (options.samples < 2) throw std::invalid_argument("MC-MLE needs at least two samples");
  const auto p = static_cast<Eigen::Index>(model.dimension());
  const std::vector<double> g = model.statistics(observed);
  const Eigen::Map<const Eigen::VectorXd> g_obs(g.data(), p);
  const std::size_t dyads = dyad_count(observed.size());

  FitResult fit;
  fit.method = "mcmle";
  fit.labels = model.labels();
  fit.observed_statistics = g_obs;

  const FitResult start = fit_valued_mple(model, observed);
  Eigen::VectorXd theta = start.coefficients.allFinite() ? start.coefficients
                                                         : Eigen::VectorXd::Zero(p);

  SamplerConfig config;
  config.burn_in = options.burn_in ? options.burn_in : 10 * dyads;
  config.interval = options.interval ? options.interval : std::max<std::size_t>(dyads, 1);
  config.sample_count = options.samples;
  config.chains = options.chains;
  config.threads = options.threads;

  std::size_t iteration = 0;
  std::size_t outside_hull = 0;
  std::vector<Eigen::Index> frozen;
  Eigen::MatrixXd covariance;
  for (std::size_t doubling = 0; doubling <= options.max_doublings; ++doubling) {
    for (std::size_t it = 0; it < options.max_iterations; ++it, ++iteration) {
      config.seed = derive_seed(options.seed, iteration);
      SampleBatch batch = sample_valued(model, {theta.data(), static_cast<std::size_t>(p)},
                                        observed, config);
      const Eigen::MatrixXd& S = batch.statistics;
      const Eigen::VectorXd mean = S.colwise().mean().transpose();
      const Eigen::MatrixXd centered = S.rowwise() - mean.transpose();
      covariance = centered.transpose() * centered / static_cast<double>(S.rows() - 1);

      fit.t_ratios.resize(p);
      outside_hull = 0;
      frozen.clear();
      for (Eigen::Index k = 0; k < p; ++k) {
        const double sd = std::sqrt(covariance(k, k));
        const double lo = S.col(k).minCoeff();
        const double hi = S.col(k).maxCoeff();
        if (g_obs[k] < lo || g_obs[k] > hi) ++outside_hull;
        if (!(sd > 0.0)) {
          if (g_obs[k] != mean[k]) {
            throw DegenerateModelError(fmt::format(
                "statistic {} is constant ({}) in the simulated sample but observed at {}",
                fit.labels[static_cast<std::size_t>(k)], mean[k], g_obs[k]));
          }
          fit.t_ratios[k] = 0.0;
          frozen.push_back(k);
        } else {
          fit.t_ratios[k] = (mean[k] - g_obs[k]) / sd;
        }
      }
      fit.acceptance_rate = batch.acceptance_rate;
      fit.sample_size = config.sample_count;
      fit.iterations = iteration + 1;
      if (fit.t_ratios.cwiseAbs().maxCoeff() < options.t_tolerance) {
        fit.converged = true;
        fit.sample_statistics = S;
        break;
      }
      Eigen::VectorXd step = solve_information(covariance, g_obs - mean, fit.ridge);
      const double norm = step.norm();
      if (norm > options.step_max) step *= options.step_max / norm;
      theta += step;
      if (it + 1 == options.max_iterations) fit.sample_statistics = S;
    }
    if (fit.converged) break;
    config.sample_count *= 2;
  }

  fit.coefficients = theta;
  fit.standard_errors = standard_errors(covariance);
  // A statistic pinned at its observed value carries no information about
  // its coefficient: the likelihood is flat or maximized at infinity.
  for (Eigen::Index k : frozen) fit.standard_errors[k] = kInf;
  fill_wald(fit);
  if (!frozen.empty()) {
    fit.converged = false;
    fit.separation = true;
    std::string names;
    for (Eigen::Index k : frozen) names += (names.empty() ? "" : ", ") + fit.labels[static_cast<std::size_t>(k)];
    fit.diagnostic = fmt::format("statistic(s) {} never vary in the simulated sample; "
                                 "coefficients not identified (boundary MLE)", names);
  } else if (!fit.converged) {
    fit.diagnostic = fmt::format("MC-MLE not converged after {} iterations; max |t| = {:.3f}",
                                 iteration, fit.t_ratios.cwiseAbs().maxCoeff());
  } else if (outside_hull > 0) {
    fit.diagnostic = fmt::format("{} observed statistics outside the simulated range", outside_hull);
  }
  return fit;
}

Eigen::VectorXd vif_diagnostics(const Eigen::MatrixXd& statistics) {
  const auto p = statistics.cols();
  const auto s = statistics.rows();
  if (s <= p) throw std::invalid_argument("VIF needs more samples than statistics");
  const Eigen::VectorXd mean = statistics.colwise().mean().transpose();
  const Eigen::MatrixXd centered = statistics.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(s - 1);
  Eigen::VectorXd out = Eigen::VectorXd::Constant(p, kInf);
  std::vector<Eigen::Index> varying;
  for (Eigen::Index k = 0; k < p; ++k)
    if (cov(k, k) > 1e-12 * std::max(1.0, mean[k] * mean[k])) varying.push_back(k);
  const auto q = static_cast<Eigen::Index>(varying.size());
  Eigen::MatrixXd corr(q, q);
  for (Eigen::Index a = 0; a < q; ++a)
    for (Eigen::Index b = 0; b < q; ++b)
      corr(a, b) = cov(varying[a], varying[b]) /
                   std::sqrt(cov(varying[a], varying[a]) * cov(varying[b], varying[b]));
  // VIF_k = 1 / (1 - R_k^2) with R_k^2 from regressing k on the others;
  // equal to the inverse-correlation diagonal, but well defined when the
  // remaining statistics are themselves collinear.
  for (Eigen::Index a = 0; a < q; ++a) {
    if (q == 1) {
      out[varying[a]] = 1.0;
      continue;
    }
    std::vector<Eigen::Index> others;
    for (Eigen::Index b = 0; b < q; ++b)
      if (b != a) others.push_back(b);
    const auto m = static_cast<Eigen::Index>(others.size());
    Eigen::MatrixXd rest(m, m);
    Eigen::VectorXd cross(m);
    for (Eigen::Index u = 0; u < m; ++u) {
      cross[u] = corr(others[u], a);
      for (Eigen::Index v = 0; v < m; ++v) rest(u, v) = corr(others[u], others[v]);
    }
    const Eigen::VectorXd beta = rest.completeOrthogonalDecomposition().solve(cross);
    const double unexplained = 1.0 - cross.dot(beta);
    out[varying[a]] = unexplained > 1e-10 ? 1.0 / unexplained : kInf;
  }
  return out;
}

}  // namespace collabnet
