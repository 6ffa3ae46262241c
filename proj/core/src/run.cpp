#include "collabnet/run.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "collabnet/backbone.hpp"
#include "collabnet/descriptives.hpp"
#include "collabnet/gof.hpp"
#include "collabnet/io.hpp"
#include "collabnet/report.hpp"
#include "json.hpp"

namespace collabnet {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(std::isfinite(v[k]) ? json(v[k]) : json(nullptr));
  return out;
}

ModelSpec model_from(const json& doc) {
  ModelSpec spec;
  const std::string mode = doc.value("mode", "binary");
  if (mode == "binary") {
    spec.mode = ModelMode::binary;
  } else if (mode == "valued") {
    spec.mode = ModelMode::valued;
  } else {
    throw std::invalid_argument(fmt::format("unknown model mode '{}'", mode));
  }
  spec.max_value = doc.value("m", spec.mode == ModelMode::valued ? 5u : 1u);
  for (const auto& t : doc.at("terms")) {
    TermSpec term;
    term.kind = parse_term_kind(t.at("kind").get<std::string>());
    term.attribute = t.value("attribute", "");
    term.covariate = t.value("covariate", "");
    term.decay = t.value("decay", 0.0);
    if (t.contains("level")) term.reference_level = t.at("level").get<std::string>();
    spec.terms.push_back(std::move(term));
  }
  return spec;
}

json model_to(const ModelSpec& spec) {
  json doc;
  doc["mode"] = spec.mode == ModelMode::binary ? "binary" : "valued";
  doc["m"] = spec.max_value;
  doc["terms"] = json::array();
  for (const auto& t : spec.terms) {
    json term;
    term["kind"] = std::string(to_string(t.kind));
    if (!t.attribute.empty()) term["attribute"] = t.attribute;
    if (!t.covariate.empty()) term["covariate"] = t.covariate;
    if (t.decay != 0.0) term["decay"] = t.decay;
    if (t.reference_level) term["level"] = *t.reference_level;
    doc["terms"].push_back(std::move(term));
  }
  return doc;
}

}  // namespace

ModelSpec parse_model_spec(std::string_view text) { return model_from(json::parse(text)); }

std::string model_spec_json(const ModelSpec& spec) { return model_to(spec).dump(2); }

std::vector<double> parse_theta(std::string_view text, const std::vector<std::string>& labels) {
  const json doc = json::parse(text);
  std::vector<double> theta;
  if (doc.is_array()) {
    theta = doc.get<std::vector<double>>();
  } else {
    const auto names = doc.at("labels").get<std::vector<std::string>>();
    const auto values = doc.at("values").get<std::vector<double>>();
    if (names.size() != values.size()) throw std::invalid_argument("theta labels and values differ in length");
    for (const auto& label : labels) {
      const auto it = std::find(names.begin(), names.end(), label);
      if (it == names.end()) throw std::invalid_argument(fmt::format("theta has no value for '{}'", label));
      theta.push_back(values[static_cast<std::size_t>(it - names.begin())]);
    }
  }
  if (theta.size() != labels.size()) {
    throw std::invalid_argument(fmt::format("theta has {} values for {} statistics", theta.size(), labels.size()));
  }
  return theta;
}

std::string fit_json(const FitResult& fit) {
  json doc;
  doc["method"] = fit.method;
  doc["labels"] = fit.labels;
  doc["estimates"] = vector_json(fit.coefficients);
  doc["standard_errors"] = vector_json(fit.standard_errors);
  doc["p_values"] = vector_json(fit.p_values);
  json stars = json::array();
  for (Eigen::Index k = 0; k < fit.p_values.size(); ++k) stars.push_back(significance_stars(fit.p_values[k]));
  doc["stars"] = stars;
  doc["flags"] = {{"converged", fit.converged}, {"ridge", fit.ridge}, {"separation", fit.separation}};
  doc["iterations"] = fit.iterations;
  doc["diagnostic"] = fit.diagnostic;
  if (fit.observed_statistics.size() > 0) doc["observed_statistics"] = vector_json(fit.observed_statistics);
  if (fit.t_ratios.size() > 0) doc["t_ratios"] = vector_json(fit.t_ratios);
  if (fit.sample_size > 0) {
    doc["sample_size"] = fit.sample_size;
    doc["acceptance_rate"] = fit.acceptance_rate;
  }
  return doc.dump(2);
}

std::string bootstrap_json(const BootstrapResult& fit) {
  json doc;
  doc["method"] = "bootstrap-mple";
  doc["labels"] = fit.labels;
  doc["point_estimates"] = vector_json(fit.point.coefficients);
  doc["estimates"] = vector_json(fit.mean);
  doc["ci_low"] = vector_json(fit.ci_low);
  doc["ci_high"] = vector_json(fit.ci_high);
  doc["significant"] = fit.significant;
  doc["replications"] = fit.replicates.rows() + static_cast<Eigen::Index>(fit.dropped);
  doc["dropped"] = fit.dropped;
  doc["periods"] = fit.periods;
  doc["flags"] = {{"converged", fit.point.converged}, {"separation", fit.point.separation}};
  doc["diagnostic"] = fit.point.diagnostic;
  return doc.dump(2);
}

ModelSpec PipelineConfig::default_tergm_model() {
  ModelSpec spec;
  spec.terms = {make_term(TermKind::edges),
                make_term(TermKind::nodecov, "libdem"),
                make_term(TermKind::absdiff, "libdem"),
                make_term(TermKind::nodecov, "ln_authors"),
                make_term(TermKind::nodematch, "region"),
                make_term(TermKind::edgecov, "distance"),
                make_term(TermKind::gwdegree, "", 0.5),
                make_term(TermKind::gwesp, "", 0.25),
                make_term(TermKind::memory_lag),
                make_term(TermKind::time_trend)};
  return spec;
}

ModelSpec PipelineConfig::default_vergm_model() {
  ModelSpec spec;
  spec.mode = ModelMode::valued;
  spec.max_value = 5;
  spec.terms = {make_term(TermKind::sum),
                make_term(TermKind::nonzero),
                make_term(TermKind::nodecov, "libdem"),
                make_term(TermKind::absdiff, "libdem"),
                make_term(TermKind::nodecov, "ln_authors"),
                make_term(TermKind::edgecov, "distance"),
                make_term(TermKind::nodesqrtcovar)};
  return spec;
}

PipelineConfig parse_pipeline_config(std::string_view text) {
  const json doc = json::parse(text);
  PipelineConfig c;
  c.first_year = doc.value("first_year", c.first_year);
  c.last_year = doc.value("last_year", c.last_year);
  c.reference_year = doc.value("reference_year", c.reference_year);
  c.imputation_rules = doc.value("imputation_rules", c.imputation_rules);
  c.quantize_m = doc.value("quantize_m", c.quantize_m);
  if (doc.contains("distance_transform")) {
    c.distance_transform = parse_distance_transform(doc.at("distance_transform").get<std::string>());
  }
  c.trim_levels = doc.value("trim_levels", c.trim_levels);
  c.seed = doc.value("seed", c.seed);
  c.threads = doc.value("threads", c.threads);
  c.nodes = doc.value("nodes", c.nodes);
  c.synth_theta = doc.value("synth_theta", c.synth_theta);
  if (doc.contains("tergm_model")) c.tergm_model = model_from(doc.at("tergm_model"));
  c.bootstrap_replications = doc.value("bootstrap_replications", c.bootstrap_replications);
  if (doc.contains("vergm_model")) c.vergm_model = model_from(doc.at("vergm_model"));
  c.vergm_years = doc.value("vergm_years", c.vergm_years);
  c.mcmle_samples = doc.value("mcmle_samples", c.mcmle_samples);
  c.mcmle_max_iterations = doc.value("mcmle_max_iterations", c.mcmle_max_iterations);
  c.gof_simulations = doc.value("gof_simulations", c.gof_simulations);
  if (c.last_year < c.first_year) throw std::invalid_argument("last_year precedes first_year");
  if (c.quantize_m < 1) throw std::invalid_argument("quantize_m must be at least 1");
  return c;
}

RunSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  RunSummary summary;
  auto emit = [&](const fs::path& rel, const std::string& text) {
    write_text(out_dir / rel, text);
    summary.files.push_back(out_dir / rel);
  };
  auto table = [&](const fs::path& rel, auto writer) {
    std::ostringstream s;
    writer(s);
    emit(rel, s.str());
  };

  // synth
  SynthConfig sc;
  sc.nodes = config.nodes;
  sc.first_year = config.first_year;
  sc.years = static_cast<std::size_t>(config.last_year - config.first_year + 1);
  sc.seed = derive_seed(config.seed, 1);
  sc.presence_theta = config.synth_theta;
  const SyntheticData synth = generate_synthetic(sc);
  for (const auto& w : synth.warnings) summary.notes.push_back("synth: " + w);
  table("inputs/publications.csv", [&](std::ostream& s) { write_publications_csv(s, synth.publications); });
  table("inputs/panel.csv", [&](std::ostream& s) { write_panel_csv(s, synth.panel); });
  table("inputs/distances.csv", [&](std::ostream& s) {
    write_square_csv(s, synth.distances_km);
  });

  // ingest (from the files just written)
  std::ifstream pub_in(out_dir / "inputs/publications.csv");
  const auto records = read_publications_csv(pub_in);
  IngestOptions ingest_options;
  ingest_options.first_year = config.first_year;
  ingest_options.last_year = config.last_year;
  const IngestResult ingested = ingest_publications(records, ingest_options);
  table("networks/rejects.csv", [&](std::ostream& s) { write_rejects_csv(s, ingested.rejects); });

  AttributePanel panel = read_panel_csv(out_dir / "inputs/panel.csv");
  SquareMatrix distances = read_square_csv(out_dir / "inputs/distances.csv");
  if (!config.imputation_rules.empty()) {
    const auto rules = parse_imputation_rules(read_text(config.imputation_rules));
    ImputationResult imputed = apply_imputation(panel, rules);
    table("networks/imputation_log.csv", [&](std::ostream& s) { write_imputation_log(s, imputed.log); });
    panel = std::move(imputed.panel);
    distances = apply_distance_rules(std::move(distances), rules);
  }
  const int reference = config.reference_year ? config.reference_year : config.first_year;
  const NetworkSeries series = align_node_sets(ingested.networks, panel, reference);
  for (const auto& net : series.networks()) {
    table(fmt::format("networks/net_{}.csv", net.year()), [&](std::ostream& s) { write_adjacency_csv(s, net); });
  }
  const NodeList& nodes = series.nodes();
  const EdgeCovariateMatrix distance = build_distance_covariate(distances, config.distance_transform, nodes);

  // describe
  ReportInputs report;
  for (const auto& net : series.networks()) report.summaries.push_back(summarize(net));
  report.democracy = democracy_summary(panel, "libdem");

  // backbone
  std::vector<BinaryNetwork> trimmed_last;
  for (const auto& net : series.networks()) {
    const DisparityScores scores = disparity_alpha(net);
    report.trims[net.year()] = trim_report(net, config.trim_levels);
    if (&net == &series.networks().back()) {
      for (double level : config.trim_levels) trimmed_last.push_back(extract_backbone(net, scores, level));
    }
  }

  // temporal fit on the weight >= 1 view
  std::vector<BinaryNetwork> binary;
  std::vector<ModelData> data;
  for (const auto& net : series.networks()) {
    binary.push_back(binarize(net, 1));
    data.push_back(model_data(panel, nodes, net.year(), {{"distance", distance}}));
  }
  const auto periods = tergm_periods(binary, data);
  BootstrapOptions boot;
  boot.replications = config.bootstrap_replications;
  boot.seed = derive_seed(config.seed, 2);
  boot.threads = config.threads;
  const BootstrapResult tergm = fit_tergm_bootstrap(config.tergm_model, periods, boot);
  emit("fits/tergm.json", bootstrap_json(tergm));
  report.tergm = tergm;

  // valued fits
  std::vector<int> years = config.vergm_years;
  if (years.empty()) years.push_back(series.networks().back().year());
  for (int year : years) {
    const auto it = std::find_if(series.networks().begin(), series.networks().end(),
                                 [&](const ValuedNetwork& n) { return n.year() == year; });
    if (it == series.networks().end()) throw std::invalid_argument(fmt::format("no network for year {}", year));
    const QuantizeResult q = quantize_weights(*it, config.quantize_m);
    for (const auto& w : q.warnings) summary.notes.push_back(fmt::format("quantize {}: {}", year, w));
    ModelSpec spec = config.vergm_model;
    spec.max_value = config.quantize_m;
    const Model model(spec, model_data(panel, nodes, year, {{"distance", distance}}));
    McmleOptions mo;
    mo.samples = config.mcmle_samples;
    mo.max_iterations = config.mcmle_max_iterations;
    mo.seed = derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(year));
    mo.threads = config.threads;
    const FitResult fit = fit_vergm_mcmle(model, q.network, mo);
    emit(fmt::format("fits/vergm_{}.json", year), fit_json(fit));
    report.vergm[year] = fit;
    if (fit.sample_statistics.rows() > fit.sample_statistics.cols()) {
      report.vif[year] = vif_diagnostics(fit.sample_statistics);
    }
  }

  // goodness of fit for the last modeled period
  {
    const TergmPeriod& last = periods.back();
    const Model model(config.tergm_model, last.data);
    GofOptions go;
    go.simulations = config.gof_simulations;
    go.seed = derive_seed(config.seed, 3);
    go.threads = config.threads;
    go.allow_nonconverged = true;
    if (!tergm.point.converged) summary.notes.push_back("gof: temporal point estimate did not converge");
    report.gof = gof_binary(tergm.point, model, last.network, go);
  }

  // figures
  const ValuedNetwork& last_net = series.networks().back();
  std::vector<double> libdem;
  for (const auto& node : nodes) libdem.push_back(panel.numeric(node, last_net.year(), "libdem"));
  report.networks.push_back({fmt::format("{}_full", last_net.year()),
                             fmt::format("Untrimmed network {}", last_net.year()), binarize(last_net, 1), libdem});
  for (std::size_t k = 0; k < trimmed_last.size(); ++k) {
    const double level = config.trim_levels[k];
    report.networks.push_back({fmt::format("{}_trim_{:.2f}", last_net.year(), level),
                               fmt::format("Trimmed network {} (level {:.2f})", last_net.year(), level),
                               trimmed_last[k], libdem});
  }
  report.layout_seed = derive_seed(config.seed, 4);
  const ReportOutput rendered = render_report(report, out_dir / "report");
  summary.files.insert(summary.files.end(), rendered.files.begin(), rendered.files.end());
  for (const auto& s : rendered.skipped) summary.notes.push_back("report: skipped " + s);

  std::string notes;
  for (const auto& n : summary.notes) notes += n + "\n";
  emit("notes.txt", notes);
  return summary;
}

}  // namespace collabnet
