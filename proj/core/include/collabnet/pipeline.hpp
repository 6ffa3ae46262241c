#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collabnet/graph.hpp"
#include "collabnet/io.hpp"

namespace collabnet {

// Publications

struct PublicationRecord {
  int year = 0;
  std::string paper_id;
  /// Country codes as listed; duplicates are collapsed at ingest.
  std::vector<std::string> countries;
};

/// year,paper_id,countries with countries separated by ';'. A header line
/// starting with "year" is skipped.
std::vector<PublicationRecord> read_publications_csv(std::istream& in);
void write_publications_csv(std::ostream& out, std::span<const PublicationRecord> records);

struct IngestOptions {
  /// Variant code -> canonical code, applied before validation.
  std::map<std::string, std::string> aliases;
  /// When set, codes outside this set are rejected; otherwise any
  /// three-letter upper-case code is accepted.
  std::optional<std::set<std::string>> known_codes;
  std::optional<int> first_year;
  std::optional<int> last_year;
};

struct IngestReject {
  std::string paper_id;
  int year = 0;
  std::string code;
  std::string reason;
};

struct IngestResult {
  /// One network per year of the range, all over the same sorted nodes.
  std::vector<ValuedNetwork> networks;
  std::vector<IngestReject> rejects;
};

/// Full counting: each paper adds 1 to every unordered pair of its distinct
/// valid countries. Unknown codes are removed from the paper and reported.
IngestResult ingest_publications(std::span<const PublicationRecord> records,
                                 const IngestOptions& options = {});

/// paper_id,year,code,reason
void write_rejects_csv(std::ostream& out, std::span<const IngestReject> rejects);

// Weight quantization

struct QuantizeResult {
  ValuedNetwork network;
  std::vector<std::string> warnings;
};

/// Zero stays 0; nonzero weights get levels 1..m by equal-frequency bins of
/// ln(w + 1) over the nonzero entries. A weight whose value is preceded by
/// r of the N nonzero values gets 1 + floor(r * m / N), so tied weights
/// share a level.
QuantizeResult quantize_weights(const ValuedNetwork& net, Weight m = 5);

// Imputation

enum class ImputationMethod { manual_value, carry_forward, variable_mean, copy_from_node };

std::string_view to_string(ImputationMethod method);
ImputationMethod parse_imputation_method(std::string_view name);

struct ImputationRule {
  std::string node;
  /// Stored variable name (ln_gdp_pc, urbanization, ...). The raw names
  /// gdp_pc, population and authors refer to the logged columns and a
  /// manual value for them is given on the raw scale. "distance" targets
  /// the distance matrix (copy_from_node only).
  std::string variable;
  std::optional<int> first_year;
  std::optional<int> last_year;
  ImputationMethod method = ImputationMethod::manual_value;
  double value = 0.0;
  std::string source_node;
};

/// JSON array of {"node","variable","years":[first,last]?,"method",
/// "value"?,"source"?}.
std::vector<ImputationRule> parse_imputation_rules(std::string_view json);

struct ImputationEntry {
  std::string node;
  std::string variable;
  int year = 0;
  ImputationMethod method = ImputationMethod::manual_value;
  double previous = 0.0;
  double value = 0.0;
};

struct ImputationResult {
  AttributePanel panel;
  std::vector<ImputationEntry> log;
};

/// Applies rules in order. Only manual_value may replace a present value.
/// Throws if any of `required` is still missing afterwards, listing every
/// uncovered (node, variable, year). Empty `required` means every numeric
/// variable of the panel.
ImputationResult apply_imputation(const AttributePanel& panel, std::span<const ImputationRule> rules,
                                  std::span<const std::string> required = {});

/// node,variable,year,method,previous,value
void write_imputation_log(std::ostream& out, std::span<const ImputationEntry> log);

/// Applies copy_from_node rules on "distance": the target's row and column
/// become the source's (the target is appended when absent).
SquareMatrix apply_distance_rules(SquareMatrix matrix, std::span<const ImputationRule> rules);

/// Panel restricted to nodes outside `drop`.
AttributePanel drop_nodes(const AttributePanel& panel, const std::set<std::string>& drop);

// Distance covariate

enum class DistanceTransform { log1p, raw };

DistanceTransform parse_distance_transform(std::string_view name);

/// Symmetric non-negative distances (km) to an edge covariate, ln(d + 1) by
/// default, with a zero diagonal. When `nodes` is non-empty the matrix is
/// restricted and ordered to them.
EdgeCovariateMatrix build_distance_covariate(const SquareMatrix& distances,
                                             DistanceTransform transform = DistanceTransform::log1p,
                                             const NodeList& nodes = {});

}  // namespace collabnet
