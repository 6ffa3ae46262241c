#include "collabnet/terms.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace collabnet {

namespace {

struct KindName {
  TermKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {TermKind::edges, "edges"},
    {TermKind::nodecov, "nodecov"},
    {TermKind::absdiff, "absdiff"},
    {TermKind::nodematch, "nodematch"},
    {TermKind::nodefactor, "nodefactor"},
    {TermKind::edgecov, "edgecov"},
    {TermKind::gwdegree, "gwdegree"},
    {TermKind::gwesp, "gwesp"},
    {TermKind::sum, "sum"},
    {TermKind::nonzero, "nonzero"},
    {TermKind::nodesqrtcovar, "nodesqrtcovar"},
    {TermKind::transitiveweights, "transitiveweights"},
    {TermKind::memory_lag, "memory_lag"},
    {TermKind::time_trend, "time_trend"},
};

bool uses_attribute(TermKind k) {
  return k == TermKind::nodecov || k == TermKind::absdiff || k == TermKind::nodematch ||
         k == TermKind::nodefactor;
}

bool binary_only(TermKind k) { return k == TermKind::gwdegree || k == TermKind::gwesp; }

bool valued_only(TermKind k) {
  return k == TermKind::sum || k == TermKind::nonzero || k == TermKind::nodesqrtcovar ||
         k == TermKind::transitiveweights;
}

/// Bits set in a & b, visited in index order.
template <typename F>
void for_each_common(const BinaryNetwork& net, std::size_t i, std::size_t j, F&& f) {
  const auto a = net.row_bits(i);
  const auto b = net.row_bits(j);
  for (std::size_t w = 0; w < a.size(); ++w) {
    std::uint64_t common = a[w] & b[w];
    while (common) {
      f(w * 64 + static_cast<std::size_t>(std::countr_zero(common)));
      common &= common - 1;
    }
  }
}

}  // namespace

std::string_view to_string(TermKind kind) {
  for (const auto& k : kKindNames)
    if (k.kind == kind) return k.name;
  return "unknown";
}

TermKind parse_term_kind(std::string_view name) {
  for (const auto& k : kKindNames)
    if (k.name == name) return k.kind;
  // Accepted spellings used by other ERGM software.
  if (name == "transitive.weights") return TermKind::transitiveweights;
  if (name == "nodecovarsqrt") return TermKind::nodesqrtcovar;
  if (name == "memory") return TermKind::memory_lag;
  if (name == "timecov") return TermKind::time_trend;
  throw std::invalid_argument("unknown term kind '" + std::string(name) + "'");
}

std::string default_reference_level(std::span<const std::string> values) {
  std::map<std::string, std::size_t> counts;
  for (const auto& v : values) ++counts[v];
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [level, count] : counts) {
    if (count > best_count) {
      best = level;
      best_count = count;
    }
  }
  return best;
}

std::vector<std::string> expand_factor_levels(const TermSpec& term,
                                              std::span<const std::string> values,
                                              std::vector<std::string>* warnings) {
  std::vector<std::string> levels(values.begin(), values.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() <= 1) {
    if (warnings) {
      warnings->push_back("nodefactor." + term.attribute +
                          " has a single level; no statistic emitted");
    }
    return {};
  }
  const std::string reference = term.reference_level.value_or(default_reference_level(values));
  if (std::find(levels.begin(), levels.end(), reference) == levels.end()) {
    throw std::invalid_argument("reference level '" + reference + "' not present in attribute " +
                                term.attribute);
  }
  std::vector<std::string> labels;
  for (const auto& level : levels)
    if (level != reference) labels.push_back("nodefactor." + term.attribute + "." + level);
  return labels;
}

Model::Model(const ModelSpec& spec, const ModelData& data) : spec_(spec) {
  if (spec_.mode == ModelMode::valued && spec_.max_value < 1) {
    throw std::invalid_argument("valued model needs max_value >= 1");
  }
  if (spec_.mode == ModelMode::valued) {
    std::stable_partition(spec_.terms.begin(), spec_.terms.end(), [](const TermSpec& t) {
      return t.kind == TermKind::sum || t.kind == TermKind::nonzero;
    });
  }
  for (std::size_t a = 0; a < spec_.terms.size(); ++a) {
    for (std::size_t b = a + 1; b < spec_.terms.size(); ++b) {
      if (spec_.terms[a] == spec_.terms[b]) {
        throw std::invalid_argument("duplicate term " + std::string(to_string(spec_.terms[a].kind)));
      }
    }
  }

  // Node count comes from whichever bound data is present; all must agree.
  auto bind_size = [&](const NodeList& nodes, const std::string& what) {
    if (nodes.empty()) return;
    if (n_ == 0) {
      n_ = nodes.size();
    } else if (nodes.size() != n_) {
      throw std::invalid_argument(fmt::format("{} has {} nodes, model is bound to {}", what,
                                              nodes.size(), n_));
    }
  };
  bind_size(data.attributes.nodes, "attribute table");
  for (const auto& [name, cov] : data.covariates) bind_size(cov.nodes(), "covariate " + name);
  if (data.lag) bind_size(data.lag->nodes(), "lag network");

  for (const TermSpec& term : spec_.terms) {
    if (spec_.mode == ModelMode::valued && binary_only(term.kind)) {
      throw std::invalid_argument(std::string(to_string(term.kind)) +
                                  " is not available for valued models");
    }
    if (spec_.mode == ModelMode::binary && valued_only(term.kind)) {
      throw std::invalid_argument(std::string(to_string(term.kind)) +
                                  " is only available for valued models");
    }
    Bound b;
    b.kind = term.kind;
    b.offset = labels_.size();
    if (uses_attribute(term.kind)) {
      if (term.kind == TermKind::nodecov || term.kind == TermKind::absdiff) {
        auto it = data.attributes.numeric.find(term.attribute);
        if (it == data.attributes.numeric.end()) {
          throw std::invalid_argument("missing numeric attribute '" + term.attribute + "'");
        }
        b.node_values = it->second;
        for (std::size_t i = 0; i < b.node_values.size(); ++i) {
          if (!std::isfinite(b.node_values[i])) {
            throw std::invalid_argument(fmt::format("attribute '{}' is missing for node {}",
                                                    term.attribute, data.attributes.nodes.at(i)));
          }
        }
        labels_.push_back(std::string(to_string(term.kind)) + "." + term.attribute);
      } else {
        auto it = data.attributes.categorical.find(term.attribute);
        if (it == data.attributes.categorical.end()) {
          throw std::invalid_argument("missing categorical attribute '" + term.attribute + "'");
        }
        const auto& values = it->second;
        std::vector<std::string> levels(values.begin(), values.end());
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        for (const auto& v : values) {
          if (v.empty()) throw std::invalid_argument("attribute '" + term.attribute + "' has a missing value");
          b.node_codes.push_back(static_cast<int>(
              std::lower_bound(levels.begin(), levels.end(), v) - levels.begin()));
        }
        if (term.kind == TermKind::nodematch) {
          labels_.push_back("nodematch." + term.attribute);
        } else {
          const auto emitted = expand_factor_levels(term, values, &warnings_);
          // level_codes maps a node code to its statistic slot (-1: reference).
          b.level_codes.assign(levels.size(), -1);
          for (std::size_t k = 0; k < emitted.size(); ++k) {
            const std::string level = emitted[k].substr(("nodefactor." + term.attribute + ".").size());
            const auto code = std::lower_bound(levels.begin(), levels.end(), level) - levels.begin();
            b.level_codes[static_cast<std::size_t>(code)] = static_cast<int>(k);
            labels_.push_back(emitted[k]);
          }
          b.width = emitted.size();
        }
      }
      bind_size(NodeList(b.node_values.empty() ? b.node_codes.size() : b.node_values.size()),
                "attribute '" + term.attribute + "'");
    } else {
      switch (term.kind) {
        case TermKind::edgecov: {
          auto it = data.covariates.find(term.covariate);
          if (it == data.covariates.end()) {
            throw std::invalid_argument("missing edge covariate '" + term.covariate + "'");
          }
          b.matrix.assign(it->second.values().begin(), it->second.values().end());
          labels_.push_back("edgecov." + term.covariate);
          break;
        }
        case TermKind::memory_lag:
          if (!data.lag) throw std::invalid_argument("memory_lag term needs a lagged network");
          b.matrix.assign(data.lag->values().begin(), data.lag->values().end());
          labels_.push_back("memory");
          break;
        case TermKind::time_trend:
          b.constant = static_cast<double>(data.time_index);
          labels_.push_back("timetrend");
          break;
        case TermKind::gwdegree:
        case TermKind::gwesp:
          if (!(term.decay > 0.0) || !std::isfinite(term.decay)) {
            throw std::invalid_argument(fmt::format("{} decay must be positive, got {}",
                                                    to_string(term.kind), term.decay));
          }
          b.decay = term.decay;
          b.ratio = -std::expm1(-term.decay);
          b.scale = std::exp(term.decay);
          labels_.push_back(fmt::format("{}.{}", to_string(term.kind), term.decay));
          break;
        default:
          labels_.push_back(std::string(to_string(term.kind)));
          break;
      }
    }
    terms_.push_back(std::move(b));
  }

  if (spec_.mode == ModelMode::valued) {
    sqrt_table_.resize(spec_.max_value + 1);
    for (Weight v = 0; v <= spec_.max_value; ++v) sqrt_table_[v] = std::sqrt(static_cast<double>(v));
  }
}

bool Model::dyad_independent() const noexcept {
  return std::none_of(terms_.begin(), terms_.end(), [](const Bound& t) {
    return t.kind == TermKind::gwdegree || t.kind == TermKind::gwesp ||
           t.kind == TermKind::nodesqrtcovar || t.kind == TermKind::transitiveweights;
  });
}

void Model::check_network(std::size_t n, ModelMode expected) const {
  if (spec_.mode != expected) {
    throw std::logic_error(spec_.mode == ModelMode::binary
                               ? "binary model evaluated on a valued network"
                               : "valued model evaluated on a binary network");
  }
  if (n_ != 0 && n != n_) {
    throw std::invalid_argument(fmt::format("network has {} nodes, model is bound to {}", n, n_));
  }
}

void Model::add_dyadic(const Bound& t, std::size_t i, std::size_t j, double weight,
                       std::span<double> out) const {
  const std::size_t n = n_;
  switch (t.kind) {
    case TermKind::edges:
    case TermKind::sum:
      out[t.offset] += weight;
      break;
    case TermKind::nodecov:
      out[t.offset] += weight * (t.node_values[i] + t.node_values[j]);
      break;
    case TermKind::absdiff:
      out[t.offset] += weight * std::abs(t.node_values[i] - t.node_values[j]);
      break;
    case TermKind::nodematch:
      if (t.node_codes[i] == t.node_codes[j]) out[t.offset] += weight;
      break;
    case TermKind::nodefactor: {
      if (t.width == 0) break;
      const int si = t.level_codes[static_cast<std::size_t>(t.node_codes[i])];
      const int sj = t.level_codes[static_cast<std::size_t>(t.node_codes[j])];
      if (si >= 0) out[t.offset + static_cast<std::size_t>(si)] += weight;
      if (sj >= 0) out[t.offset + static_cast<std::size_t>(sj)] += weight;
      break;
    }
    case TermKind::edgecov:
    case TermKind::memory_lag:
      out[t.offset] += weight * t.matrix[i * n + j];
      break;
    case TermKind::time_trend:
      out[t.offset] += weight * t.constant;
      break;
    default:
      break;
  }
}

double Model::geometric_weight(const Bound& t, std::size_t count) const {
  return t.scale * (1.0 - std::pow(t.ratio, static_cast<double>(count)));
}

std::vector<double> Model::statistics(const BinaryNetwork& net) const {
  check_network(net.size(), ModelMode::binary);
  const std::size_t n = net.size();
  std::vector<double> out(dimension(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : net.neighbors(i)) {
      if (j <= i) continue;
      for (const auto& t : terms_) {
        if (t.kind == TermKind::gwesp) {
          out[t.offset] += geometric_weight(t, net.shared_partners(i, j));
        } else if (t.kind != TermKind::gwdegree) {
          add_dyadic(t, i, j, 1.0, out);
        }
      }
    }
  }
  for (const auto& t : terms_) {
    if (t.kind != TermKind::gwdegree) continue;
    for (std::size_t i = 0; i < n; ++i) out[t.offset] += geometric_weight(t, net.degree(i));
  }
  return out;
}

void Model::change_binary(const BinaryNetwork& net, std::size_t i, std::size_t j,
                          std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const bool present = net.has_edge(i, j);
  for (const auto& t : terms_) {
    switch (t.kind) {
      case TermKind::gwdegree: {
        const std::size_t di = net.degree(i) - (present ? 1 : 0);
        const std::size_t dj = net.degree(j) - (present ? 1 : 0);
        out[t.offset] += std::pow(t.ratio, static_cast<double>(di)) +
                         std::pow(t.ratio, static_cast<double>(dj));
        break;
      }
      case TermKind::gwesp: {
        // The new tie's own term, plus one extra shared partner on each of
        // the two ties closing every i-k-j path.
        double delta = geometric_weight(t, net.shared_partners(i, j));
        const std::size_t through_ij = present ? 1 : 0;
        for_each_common(net, i, j, [&](std::size_t k) {
          delta += std::pow(t.ratio, static_cast<double>(net.shared_partners(i, k) - through_ij));
          delta += std::pow(t.ratio, static_cast<double>(net.shared_partners(j, k) - through_ij));
        });
        out[t.offset] += delta;
        break;
      }
      default:
        add_dyadic(t, i, j, 1.0, out);
        break;
    }
  }
}

std::vector<double> Model::change_binary(const BinaryNetwork& net, std::size_t i,
                                         std::size_t j) const {
  check_network(net.size(), ModelMode::binary);
  if (i >= net.size() || j >= net.size() || i == j) {
    throw std::invalid_argument(fmt::format("invalid dyad ({}, {})", i, j));
  }
  std::vector<double> out(dimension(), 0.0);
  change_binary(net, i, j, out);
  return out;
}

std::vector<double> Model::statistics(const ValuedNetwork& net) const {
  check_network(net.size(), ModelMode::valued);
  const std::size_t n = net.size();
  std::vector<double> out(dimension(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Weight y = net.weight(i, j);
      if (y == 0) continue;
      if (y > spec_.max_value) {
        throw std::invalid_argument(fmt::format("dyad ({}, {}) has value {} above the model "
                                                "maximum {}", i, j, y, spec_.max_value));
      }
      for (const auto& t : terms_) {
        if (t.kind == TermKind::nonzero) {
          out[t.offset] += 1.0;
        } else {
          add_dyadic(t, i, j, static_cast<double>(y), out);
        }
      }
    }
  }
  for (const auto& t : terms_) {
    if (t.kind == TermKind::nodesqrtcovar) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double root_sum = 0.0;
        double plain_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const Weight y = net.weight(i, j);
          root_sum += sqrt_table_[y];
          plain_sum += static_cast<double>(y);
        }
        total += 0.5 * (root_sum * root_sum - plain_sum);
      }
      out[t.offset] = total;
    } else if (t.kind == TermKind::transitiveweights) {
      double total = 0.0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          total += transitive_pair(net, a, b, a, b, net.weight(a, b));
      out[t.offset] = total;
    }
  }
  return out;
}

double Model::transitive_pair(const ValuedNetwork& net, std::size_t a, std::size_t b,
                              std::size_t i, std::size_t j, Weight v) const {
  auto value = [&](std::size_t x, std::size_t y) -> Weight {
    if ((x == i && y == j) || (x == j && y == i)) return v;
    return net.weight(x, y);
  };
  const Weight direct = value(a, b);
  if (direct == 0) return 0.0;
  Weight best = 0;
  for (std::size_t k = 0; k < net.size(); ++k) {
    if (k == a || k == b) continue;
    best = std::max(best, std::min(value(a, k), value(k, b)));
    if (best >= direct) break;
  }
  return static_cast<double>(std::min(direct, best));
}

void Model::delta_valued(const ValuedNetwork& net, std::size_t i, std::size_t j, Weight v,
                         std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const Weight w = net.weight(i, j);
  if (v == w) return;
  const std::size_t n = net.size();
  const double change = static_cast<double>(v) - static_cast<double>(w);
  for (const auto& t : terms_) {
    switch (t.kind) {
      case TermKind::nonzero:
        out[t.offset] += static_cast<double>(v > 0) - static_cast<double>(w > 0);
        break;
      case TermKind::nodesqrtcovar: {
        double si = 0.0;
        double sj = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          si += sqrt_table_[net.weight(i, k)];
          sj += sqrt_table_[net.weight(j, k)];
        }
        out[t.offset] += (sqrt_table_[v] - sqrt_table_[w]) * (si + sj);
        break;
      }
      case TermKind::transitiveweights: {
        double delta = transitive_pair(net, i, j, i, j, v) - transitive_pair(net, i, j, i, j, w);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          delta += transitive_pair(net, i, k, i, j, v) - transitive_pair(net, i, k, i, j, w);
          delta += transitive_pair(net, j, k, i, j, v) - transitive_pair(net, j, k, i, j, w);
        }
        out[t.offset] += delta;
        break;
      }
      default:
        add_dyadic(t, i, j, change, out);
        break;
    }
  }
}

std::vector<double> Model::delta_valued(const ValuedNetwork& net, std::size_t i, std::size_t j,
                                        Weight v) const {
  check_network(net.size(), ModelMode::valued);
  if (i >= net.size() || j >= net.size() || i == j) {
    throw std::invalid_argument(fmt::format("invalid dyad ({}, {})", i, j));
  }
  if (v > spec_.max_value) {
    throw std::invalid_argument(fmt::format("value {} outside 0..{}", v, spec_.max_value));
  }
  std::vector<double> out(dimension(), 0.0);
  delta_valued(net, i, j, v, out);
  return out;
}

}  // namespace collabnet
