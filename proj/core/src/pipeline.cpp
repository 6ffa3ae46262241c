#include "collabnet/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace collabnet {

// Publications

std::vector<PublicationRecord> read_publications_csv(std::istream& in) {
  std::vector<PublicationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (line_no == 1 && !cells.empty() && cells[0] == "year") continue;
    if (cells.size() != 3) {
      throw std::runtime_error(fmt::format("publications line {}: expected year,paper_id,countries", line_no));
    }
    PublicationRecord rec;
    try {
      std::size_t used = 0;
      rec.year = std::stoi(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("publications line {}: bad year '{}'", line_no, cells[0]));
    }
    rec.paper_id = cells[1];
    for (auto& code : split_csv_line(cells[2], ';'))
      if (!code.empty()) rec.countries.push_back(std::move(code));
    if (rec.countries.empty()) {
      throw std::runtime_error(fmt::format("publications line {}: paper lists no country", line_no));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_publications_csv(std::ostream& out, std::span<const PublicationRecord> records) {
  out << "year,paper_id,countries\n";
  for (const auto& r : records) out << r.year << ',' << r.paper_id << ',' << fmt::format("{}", fmt::join(r.countries, ";")) << '\n';
}

namespace {

bool looks_like_code(const std::string& code) {
  return code.size() == 3 &&
         std::all_of(code.begin(), code.end(), [](unsigned char c) { return std::isupper(c); });
}

}  // namespace

IngestResult ingest_publications(std::span<const PublicationRecord> records,
                                 const IngestOptions& options) {
  IngestResult result;
  struct Paper {
    int year;
    std::vector<std::string> codes;
  };
  std::vector<Paper> papers;
  std::set<std::string> seen;
  for (const auto& rec : records) {
    if ((options.first_year && rec.year < *options.first_year) ||
        (options.last_year && rec.year > *options.last_year)) {
      result.rejects.push_back({rec.paper_id, rec.year, "", "year outside configured range"});
      continue;
    }
    std::set<std::string> codes;
    for (const auto& raw : rec.countries) {
      const auto alias = options.aliases.find(raw);
      const std::string& code = alias == options.aliases.end() ? raw : alias->second;
      const bool valid = options.known_codes ? options.known_codes->contains(code) : looks_like_code(code);
      if (!valid) {
        result.rejects.push_back({rec.paper_id, rec.year, raw, "unknown country code"});
        continue;
      }
      codes.insert(code);
    }
    seen.insert(codes.begin(), codes.end());
    papers.push_back({rec.year, {codes.begin(), codes.end()}});
  }

  const NodeList nodes = options.known_codes ? NodeList(options.known_codes->begin(), options.known_codes->end())
                                             : NodeList(seen.begin(), seen.end());
  int first = options.first_year.value_or(std::numeric_limits<int>::max());
  int last = options.last_year.value_or(std::numeric_limits<int>::min());
  if (!options.first_year || !options.last_year) {
    for (const auto& p : papers) {
      if (!options.first_year) first = std::min(first, p.year);
      if (!options.last_year) last = std::max(last, p.year);
    }
  }
  if (first > last) return result;

  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < nodes.size(); ++k) index[nodes[k]] = k;
  for (int y = first; y <= last; ++y) result.networks.emplace_back(nodes, y);
  for (const auto& p : papers) {
    ValuedNetwork& net = result.networks[static_cast<std::size_t>(p.year - first)];
    for (std::size_t a = 0; a < p.codes.size(); ++a)
      for (std::size_t b = a + 1; b < p.codes.size(); ++b)
        net.add_weight(index.at(p.codes[a]), index.at(p.codes[b]), 1);
  }
  return result;
}

void write_rejects_csv(std::ostream& out, std::span<const IngestReject> rejects) {
  out << "paper_id,year,code,reason\n";
  for (const auto& r : rejects) out << r.paper_id << ',' << r.year << ',' << r.code << ',' << r.reason << '\n';
}

// Weight quantization

QuantizeResult quantize_weights(const ValuedNetwork& net, Weight m) {
  if (m < 1) throw std::invalid_argument("quantization needs m >= 1");
  const std::size_t n = net.size();
  // ln(w + 1) is increasing, so ranks of w and of ln(w + 1) coincide.
  std::vector<Weight> nonzero;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (net.weight(i, j) > 0) nonzero.push_back(net.weight(i, j));
  std::sort(nonzero.begin(), nonzero.end());

  QuantizeResult result{ValuedNetwork(net.nodes(), net.year()), {}};
  std::size_t levels_available = 0;
  for (std::size_t k = 0; k < nonzero.size(); ++k)
    if (k == 0 || nonzero[k] != nonzero[k - 1]) ++levels_available;
  if (!nonzero.empty() && levels_available < m) {
    result.warnings.push_back(fmt::format(
        "degenerate bins: {} distinct nonzero weights for {} levels; tied weights share a level",
        levels_available, m));
  }
  const auto N = static_cast<std::uint64_t>(nonzero.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Weight w = net.weight(i, j);
      if (w == 0) continue;
      const auto r = static_cast<std::uint64_t>(
          std::lower_bound(nonzero.begin(), nonzero.end(), w) - nonzero.begin());
      result.network.set_weight(i, j, static_cast<Weight>(1 + r * m / N));
    }
  }
  return result;
}

// Imputation

std::string_view to_string(ImputationMethod method) {
  switch (method) {
    case ImputationMethod::manual_value: return "manual_value";
    case ImputationMethod::carry_forward: return "carry_forward";
    case ImputationMethod::variable_mean: return "variable_mean";
    case ImputationMethod::copy_from_node: return "copy_from_node";
  }
  return "unknown";
}

ImputationMethod parse_imputation_method(std::string_view name) {
  for (auto m : {ImputationMethod::manual_value, ImputationMethod::carry_forward,
                 ImputationMethod::variable_mean, ImputationMethod::copy_from_node})
    if (to_string(m) == name) return m;
  throw std::invalid_argument(fmt::format("unknown imputation method '{}'", name));
}

std::vector<ImputationRule> parse_imputation_rules(std::string_view json) {
  const auto doc = nlohmann::json::parse(json);
  const auto& list = doc.is_object() && doc.contains("rules") ? doc.at("rules") : doc;
  if (!list.is_array()) throw std::invalid_argument("imputation rules must be a JSON array");
  std::vector<ImputationRule> rules;
  for (const auto& item : list) {
    ImputationRule r;
    r.node = item.at("node").get<std::string>();
    r.variable = item.at("variable").get<std::string>();
    r.method = parse_imputation_method(item.at("method").get<std::string>());
    if (item.contains("years")) {
      const auto& years = item.at("years");
      if (!years.is_array() || years.size() != 2) {
        throw std::invalid_argument("rule years must be [first, last]");
      }
      r.first_year = years[0].get<int>();
      r.last_year = years[1].get<int>();
    }
    if (r.method == ImputationMethod::manual_value) {
      if (!item.contains("value")) throw std::invalid_argument("manual_value rule needs a value");
      r.value = item.at("value").get<double>();
    }
    if (r.method == ImputationMethod::copy_from_node) {
      if (!item.contains("source")) throw std::invalid_argument("copy_from_node rule needs a source");
      r.source_node = item.at("source").get<std::string>();
    }
    if (r.variable == "distance" && r.method != ImputationMethod::copy_from_node) {
      throw std::invalid_argument("distance rules support copy_from_node only");
    }
    rules.push_back(std::move(r));
  }
  return rules;
}

namespace {

/// Stored column and raw-to-stored transform for a rule's variable.
std::pair<std::string, bool> stored_variable(const std::string& variable) {
  if (variable == "gdp_pc" || variable == "population" || variable == "authors") {
    return {"ln_" + variable, true};
  }
  return {variable, false};
}

bool in_range(const ImputationRule& rule, int year) {
  return (!rule.first_year || year >= *rule.first_year) && (!rule.last_year || year <= *rule.last_year);
}

}  // namespace

ImputationResult apply_imputation(const AttributePanel& panel, std::span<const ImputationRule> rules,
                                  std::span<const std::string> required) {
  ImputationResult result{panel, {}};
  AttributePanel& out = result.panel;
  const std::vector<int> years = panel.years();
  for (const auto& rule : rules) {
    if (rule.variable == "distance") continue;
    const auto [variable, logged] = stored_variable(rule.variable);
    auto record = [&](int year, double previous, double value) {
      out.set_numeric(rule.node, year, variable, value);
      result.log.push_back({rule.node, variable, year, rule.method, previous, value});
    };
    std::vector<int> target_years;
    for (int y : years)
      if (in_range(rule, y)) target_years.push_back(y);

    switch (rule.method) {
      case ImputationMethod::manual_value: {
        if (logged && !(rule.value > 0)) {
          throw std::invalid_argument(fmt::format("manual {} for {} must be positive", rule.variable, rule.node));
        }
        const double v = logged ? std::log(rule.value) : rule.value;
        for (int y : target_years) record(y, out.numeric(rule.node, y, variable), v);
        break;
      }
      case ImputationMethod::carry_forward: {
        for (int y : target_years) {
          if (!std::isnan(out.numeric(rule.node, y, variable))) continue;
          double prior = kMissing;
          for (int p : years) {
            if (p >= y) break;
            const double v = out.numeric(rule.node, p, variable);
            if (!std::isnan(v)) prior = v;
          }
          if (!std::isnan(prior)) record(y, kMissing, prior);
        }
        break;
      }
      case ImputationMethod::variable_mean: {
        double sum = 0.0;
        std::size_t count = 0;
        for (int y : years) {
          const double v = out.numeric(rule.node, y, variable);
          if (!std::isnan(v)) {
            sum += v;
            ++count;
          }
        }
        if (count == 0) break;
        for (int y : target_years)
          if (std::isnan(out.numeric(rule.node, y, variable))) record(y, kMissing, sum / static_cast<double>(count));
        break;
      }
      case ImputationMethod::copy_from_node: {
        for (int y : target_years) {
          if (!std::isnan(out.numeric(rule.node, y, variable))) continue;
          const double v = out.numeric(rule.source_node, y, variable);
          if (!std::isnan(v)) record(y, kMissing, v);
        }
        break;
      }
    }
  }

  std::vector<std::string> variables(required.begin(), required.end());
  if (variables.empty()) variables = panel.numeric_variables();
  std::vector<std::string> gaps;
  for (const auto& [node, by_year] : out.rows()) {
    for (const auto& [year, row] : by_year) {
      for (const auto& v : variables) {
        const auto it = row.numeric.find(v);
        if (it == row.numeric.end() || std::isnan(it->second)) gaps.push_back(fmt::format("({}, {}, {})", node, v, year));
      }
    }
  }
  if (!gaps.empty()) {
    throw std::runtime_error(fmt::format("{} missing values not covered by imputation rules: {}", gaps.size(),
                                         fmt::join(gaps, " ")));
  }
  return result;
}

void write_imputation_log(std::ostream& out, std::span<const ImputationEntry> log) {
  out << "node,variable,year,method,previous,value\n";
  for (const auto& e : log) {
    out << fmt::format("{},{},{},{},{},{}\n", e.node, e.variable, e.year, to_string(e.method),
                       std::isnan(e.previous) ? std::string() : fmt::format("{}", e.previous), e.value);
  }
}

SquareMatrix apply_distance_rules(SquareMatrix matrix, std::span<const ImputationRule> rules) {
  for (const auto& rule : rules) {
    if (rule.variable != "distance") continue;
    const auto find = [&](const std::string& node) {
      return static_cast<std::size_t>(std::find(matrix.nodes.begin(), matrix.nodes.end(), node) -
                                      matrix.nodes.begin());
    };
    const std::size_t source = find(rule.source_node);
    if (source == matrix.size()) {
      throw std::invalid_argument(fmt::format("distance source node {} not in matrix", rule.source_node));
    }
    std::size_t target = find(rule.node);
    if (target == matrix.size()) {
      const std::size_t n = matrix.size();
      std::vector<double> grown((n + 1) * (n + 1), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) grown[i * (n + 1) + j] = matrix.at(i, j);
      matrix.nodes.push_back(rule.node);
      matrix.values = std::move(grown);
      target = n;
    }
    const std::size_t n = matrix.size();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == target) continue;
      const double d = j == source ? 0.0 : matrix.at(source, j);
      matrix.values[target * n + j] = d;
      matrix.values[j * n + target] = d;
    }
    matrix.values[target * n + target] = 0.0;
  }
  return matrix;
}

AttributePanel drop_nodes(const AttributePanel& panel, const std::set<std::string>& drop) {
  AttributePanel out;
  for (const auto& [node, by_year] : panel.rows()) {
    if (drop.contains(node)) continue;
    for (const auto& [year, row] : by_year) {
      for (const auto& [v, x] : row.numeric) out.set_numeric(node, year, v, x);
      for (const auto& [v, x] : row.categorical) out.set_categorical(node, year, v, x);
    }
  }
  return out;
}

// Distance covariate

DistanceTransform parse_distance_transform(std::string_view name) {
  if (name == "log1p" || name == "log") return DistanceTransform::log1p;
  if (name == "raw") return DistanceTransform::raw;
  throw std::invalid_argument(fmt::format("unknown distance transform '{}'", name));
}

EdgeCovariateMatrix build_distance_covariate(const SquareMatrix& distances, DistanceTransform transform,
                                             const NodeList& nodes) {
  const std::size_t n = distances.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = distances.at(i, j);
      if (i == j) continue;
      if (!std::isfinite(d) || d < 0) {
        throw std::invalid_argument(fmt::format("distance {}-{} must be finite and non-negative",
                                                distances.nodes[i], distances.nodes[j]));
      }
      if (d != distances.at(j, i)) {
        throw std::invalid_argument(
            fmt::format("distance matrix is asymmetric at {}-{}", distances.nodes[i], distances.nodes[j]));
      }
    }
  }
  const NodeList& order = nodes.empty() ? distances.nodes : nodes;
  std::vector<std::size_t> pick;
  for (const auto& node : order) {
    const auto it = std::find(distances.nodes.begin(), distances.nodes.end(), node);
    if (it == distances.nodes.end()) throw std::invalid_argument(fmt::format("no distances for node {}", node));
    pick.push_back(static_cast<std::size_t>(it - distances.nodes.begin()));
  }
  const std::size_t m = order.size();
  std::vector<double> values(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const double d = distances.at(pick[a], pick[b]);
      values[a * m + b] = transform == DistanceTransform::log1p ? std::log1p(d) : d;
    }
  }
  return {order, std::move(values), "distance"};
}

}  // namespace collabnet
