#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collabnet/graph.hpp"

namespace collabnet {

enum class TermKind {
  edges,
  nodecov,
  absdiff,
  nodematch,
  nodefactor,
  edgecov,
  gwdegree,
  gwesp,
  sum,
  nonzero,
  nodesqrtcovar,
  transitiveweights,
  memory_lag,
  time_trend,
};

std::string_view to_string(TermKind kind);
TermKind parse_term_kind(std::string_view name);

struct TermSpec {
  TermKind kind = TermKind::edges;
  /// Node attribute for nodecov/absdiff/nodematch/nodefactor.
  std::string attribute;
  /// Edge covariate name for edgecov.
  std::string covariate;
  /// Fixed decay for gwdegree/gwesp.
  double decay = 0.0;
  /// Explicit nodefactor reference level; otherwise the most frequent level.
  std::optional<std::string> reference_level;

  bool operator==(const TermSpec&) const = default;
};

/// Term with its attribute (nodecov/absdiff/nodematch/nodefactor) or
/// covariate (edgecov) name, and decay for gwdegree/gwesp.
inline TermSpec make_term(TermKind kind, std::string name = {}, double decay = 0.0) {
  TermSpec t;
  t.kind = kind;
  if (kind == TermKind::edgecov) {
    t.covariate = std::move(name);
  } else {
    t.attribute = std::move(name);
  }
  t.decay = decay;
  return t;
}

enum class ModelMode { binary, valued };

struct ModelSpec {
  std::vector<TermSpec> terms;
  ModelMode mode = ModelMode::binary;
  /// Largest dyad value in valued mode.
  Weight max_value = 1;
};

/// Everything a model may reference besides the network itself.
struct ModelData {
  NodeAttributes attributes;
  std::map<std::string, EdgeCovariateMatrix> covariates;
  /// Previous period's binary network for memory_lag.
  std::optional<EdgeCovariateMatrix> lag;
  /// 1-based index of the modeled period for time_trend.
  int time_index = 1;
};

/// Reference level rule for nodefactor: most frequent, ties to the
/// lexicographically smallest.
std::string default_reference_level(std::span<const std::string> values);

/// Labels emitted for the non-reference levels of a factor attribute.
/// Warns through `warnings` (when given) if the factor has a single level.
std::vector<std::string> expand_factor_levels(const TermSpec& term,
                                              std::span<const std::string> values,
                                              std::vector<std::string>* warnings = nullptr);

/// A ModelSpec bound to concrete node attributes and covariates. Provides
/// full statistic evaluation g(y) and incremental changes for binary
/// toggles and valued reassignments.
///
/// In valued mode the sum and nonzero terms are moved to the front of the
/// statistic vector; every other term keeps its declared order.
class Model {
 public:
  Model(const ModelSpec& spec, const ModelData& data);

  std::size_t dimension() const noexcept { return labels_.size(); }
  std::size_t node_count() const noexcept { return n_; }
  ModelMode mode() const noexcept { return spec_.mode; }
  Weight max_value() const noexcept { return spec_.max_value; }
  const ModelSpec& spec() const noexcept { return spec_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  /// True when no term couples dyads (no gwdegree/gwesp/nodesqrtcovar/
  /// transitiveweights).
  bool dyad_independent() const noexcept;

  std::vector<double> statistics(const BinaryNetwork& net) const;
  std::vector<double> statistics(const ValuedNetwork& net) const;

  /// g(y with y_ij = 1) - g(y with y_ij = 0), whatever the current state.
  void change_binary(const BinaryNetwork& net, std::size_t i, std::size_t j,
                     std::span<double> out) const;
  std::vector<double> change_binary(const BinaryNetwork& net, std::size_t i, std::size_t j) const;

  /// g(y with y_ij = v) - g(y).
  void delta_valued(const ValuedNetwork& net, std::size_t i, std::size_t j, Weight v,
                    std::span<double> out) const;
  std::vector<double> delta_valued(const ValuedNetwork& net, std::size_t i, std::size_t j,
                                   Weight v) const;

 private:
  struct Bound {
    TermKind kind;
    std::size_t offset = 0;
    std::size_t width = 1;
    std::vector<double> node_values;      // nodecov / absdiff
    std::vector<int> node_codes;          // nodematch / nodefactor
    std::vector<int> level_codes;         // nodefactor: code per emitted statistic
    std::vector<double> matrix;           // edgecov / memory_lag
    double constant = 0.0;                // time_trend
    double decay = 0.0;
    double ratio = 0.0;                   // 1 - exp(-decay)
    double scale = 0.0;                   // exp(decay)
  };

  void check_network(std::size_t n, ModelMode expected) const;
  /// Per-dyad multiplier of a dyadic term (width 1 terms), or the term's
  /// per-level contribution written into out.
  void add_dyadic(const Bound& t, std::size_t i, std::size_t j, double weight,
                  std::span<double> out) const;
  double geometric_weight(const Bound& t, std::size_t count) const;
  double transitive_pair(const ValuedNetwork& net, std::size_t a, std::size_t b, std::size_t i,
                         std::size_t j, Weight v) const;

  ModelSpec spec_;
  std::size_t n_ = 0;
  std::vector<Bound> terms_;
  std::vector<std::string> labels_;
  std::vector<std::string> warnings_;
  std::vector<double> sqrt_table_;
};

}  // namespace collabnet
