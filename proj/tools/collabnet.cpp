// collabnet command-line front end.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "collabnet/backbone.hpp"
#include "collabnet/descriptives.hpp"
#include "collabnet/estimation.hpp"
#include "collabnet/gof.hpp"
#include "collabnet/io.hpp"
#include "collabnet/layout.hpp"
#include "collabnet/pipeline.hpp"
#include "collabnet/report.hpp"
#include "collabnet/run.hpp"
#include "collabnet/sampler.hpp"
#include "collabnet/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace collabnet;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::size_t threads = 1;
};

/// Node covariates shared by the model-fitting subcommands.
struct Covariates {
  std::string panel_path;
  std::string distance_path;
  std::string transform = "log1p";

  std::optional<AttributePanel> panel;
  std::optional<SquareMatrix> distances;

  void load() {
    if (!panel_path.empty()) panel = read_panel_csv(fs::path(panel_path));
    if (!distance_path.empty()) distances = read_square_csv(fs::path(distance_path));
  }

  ModelData data(const NodeList& nodes, int year) const {
    ModelData d;
    if (panel) {
      d.attributes = panel->snapshot(nodes, year);
    } else {
      d.attributes.nodes = nodes;
    }
    if (distances) {
      d.covariates.emplace("distance",
                           build_distance_covariate(*distances, parse_distance_transform(transform), nodes));
    }
    return d;
  }

  void add_options(CLI::App* app) {
    app->add_option("--panel", panel_path, "Panel CSV (node,year,libdem,...)");
    app->add_option("--distance", distance_path, "Distance matrix CSV (km)");
    app->add_option("--distance-transform", transform, "log1p or raw")->check(CLI::IsMember({"log1p", "raw"}));
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : split_csv_line(text)) out.push_back(std::stod(cell));
  return out;
}

NetworkSeries load_series(const std::string& dir, const Covariates& cov, int reference_year) {
  auto raw = read_series_dir(fs::path(dir));
  if (raw.empty()) throw std::runtime_error(fmt::format("no net_<year>.csv files in {}", dir));
  if (!cov.panel) return NetworkSeries(std::move(raw));
  return align_node_sets(raw, *cov.panel, reference_year ? reference_year : raw.front().year());
}

void write_file(const fs::path& path, const std::string& text) {
  write_text(path, text);
  std::cerr << "wrote " << path.string() << '\n';
}

template <typename Writer>
void write_table(const fs::path& path, Writer writer) {
  std::ostringstream s;
  writer(s);
  write_file(path, s.str());
}

std::string slurp(const std::string& path) { return read_text(fs::path(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Country collaboration network analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline JSON configuration");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build yearly networks from a publications CSV");
  std::string publications, aliases_path, known_path;
  std::optional<int> first_year, last_year;
  ingest->add_option("--publications", publications, "year,paper_id,country;country;...")->required();
  ingest->add_option("--aliases", aliases_path, "JSON object mapping variant code to canonical code");
  ingest->add_option("--known-codes", known_path, "File with one valid country code per line");
  ingest->add_option("--first-year", first_year);
  ingest->add_option("--last-year", last_year);

  // describe
  auto* describe = app.add_subcommand("describe", "Whole-network descriptive statistics");
  std::string series_dir;
  Covariates describe_cov;
  describe->add_option("--series", series_dir, "Directory of net_<year>.csv")->required();
  describe_cov.add_options(describe);

  // backbone
  auto* backbone = app.add_subcommand("backbone", "Disparity-filter backbones and trim report");
  std::string levels_text = "0.5,0.25,0.05";
  backbone->add_option("--series", series_dir)->required();
  backbone->add_option("--levels", levels_text, "Comma-separated significance levels");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Draw networks from a model at given coefficients");
  std::string model_path, theta_path, start_path;
  std::size_t nodes = 0, draws = 100, burn_in = 0, interval = 0;
  int year = 0;
  Covariates sim_cov;
  simulate->add_option("--model", model_path)->required();
  simulate->add_option("--theta", theta_path)->required();
  simulate->add_option("--nodes", nodes, "Start from the empty network on this many nodes");
  simulate->add_option("--net", start_path, "Start network (adjacency CSV)");
  simulate->add_option("--year", year, "Panel year for node attributes");
  simulate->add_option("--draws", draws);
  simulate->add_option("--burn-in", burn_in, "0 selects 10 * dyads");
  simulate->add_option("--interval", interval, "0 selects the number of dyads");
  sim_cov.add_options(simulate);

  // fit-tergm
  auto* fit_tergm = app.add_subcommand("fit-tergm", "Bootstrapped pseudolikelihood temporal model");
  std::size_t reps = 1500;
  std::string out_path;
  int reference_year = 0;
  Weight threshold = 1;
  Covariates tergm_cov;
  fit_tergm->add_option("--series", series_dir)->required();
  fit_tergm->add_option("--model", model_path)->required();
  fit_tergm->add_option("--reps", reps, "Bootstrap replications");
  fit_tergm->add_option("--reference-year", reference_year);
  fit_tergm->add_option("--threshold", threshold, "Binarize weights >= threshold");
  fit_tergm->add_option("--out", out_path, "Fit JSON (default <out-dir>/tergm.json)");
  tergm_cov.add_options(fit_tergm);

  // fit-vergm
  auto* fit_vergm = app.add_subcommand("fit-vergm", "Monte-Carlo MLE for a valued network");
  std::string net_path;
  std::size_t samples = 15000;
  bool quantize = false;
  Covariates vergm_cov;
  fit_vergm->add_option("--net", net_path)->required();
  fit_vergm->add_option("--model", model_path)->required();
  fit_vergm->add_option("--year", year, "Panel year for node attributes");
  fit_vergm->add_option("--samples", samples, "MCMC draws per iteration");
  fit_vergm->add_flag("--quantize", quantize, "Quantize raw counts to 0..m first");
  fit_vergm->add_option("--out", out_path);
  vergm_cov.add_options(fit_vergm);

  // gof
  auto* gof = app.add_subcommand("gof", "Goodness of fit for a binary model");
  std::string fit_path;
  std::size_t simulations = 100;
  bool allow_nonconverged = false;
  Covariates gof_cov;
  gof->add_option("--series", series_dir)->required();
  gof->add_option("--model", model_path)->required();
  gof->add_option("--fit", fit_path, "Fit JSON with labels and estimates")->required();
  gof->add_option("--simulations", simulations);
  gof->add_option("--threshold", threshold);
  gof->add_flag("--allow-nonconverged", allow_nonconverged);
  gof_cov.add_options(gof);

  // layout
  auto* layout = app.add_subcommand("layout", "Fruchterman-Reingold coordinates");
  std::size_t iterations = 500;
  layout->add_option("--net", net_path)->required();
  layout->add_option("--iterations", iterations);
  layout->add_option("--threshold", threshold);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic fixture");
  SynthConfig synth_config;
  std::optional<double> target_density;
  synth->add_option("--nodes", synth_config.nodes);
  synth->add_option("--years", synth_config.years);
  synth->add_option("--first-year", synth_config.first_year);
  synth->add_option("--density", target_density, "Calibrate the edges coefficient to this density");

  // report
  auto* report = app.add_subcommand("report", "Render tables and figures from saved artifacts");
  std::string tergm_fit_path;
  std::vector<std::string> vergm_fit_paths;
  Covariates report_cov;
  report->add_option("--series", series_dir)->required();
  report->add_option("--tergm", tergm_fit_path, "fit-tergm JSON");
  report->add_option("--vergm", vergm_fit_paths, "fit-vergm JSON files named *_<year>.json");
  report->add_option("--levels", levels_text);
  report_cov.add_options(report);

  // run
  auto* run = app.add_subcommand("run", "End-to-end synthetic pipeline");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out_dir(g.out_dir);
    std::optional<PipelineConfig> config;
    if (!g.config.empty()) config = parse_pipeline_config(slurp(g.config));

    if (*ingest) {
      std::ifstream in(publications);
      if (!in) throw std::runtime_error("cannot open " + publications);
      const auto records = read_publications_csv(in);
      IngestOptions opts;
      if (!aliases_path.empty()) opts.aliases = json::parse(slurp(aliases_path)).get<std::map<std::string, std::string>>();
      if (!known_path.empty()) {
        std::set<std::string> known;
        std::istringstream lines(slurp(known_path));
        for (std::string line; std::getline(lines, line);)
          if (!trim(line).empty()) known.insert(trim(line));
        opts.known_codes = std::move(known);
      }
      opts.first_year = first_year ? first_year : (config ? std::optional<int>(config->first_year) : std::nullopt);
      opts.last_year = last_year ? last_year : (config ? std::optional<int>(config->last_year) : std::nullopt);
      const IngestResult result = ingest_publications(records, opts);
      for (const auto& net : result.networks) {
        write_table(out_dir / fmt::format("net_{}.csv", net.year()),
                    [&](std::ostream& s) { write_adjacency_csv(s, net); });
      }
      write_table(out_dir / "rejects.csv", [&](std::ostream& s) { write_rejects_csv(s, result.rejects); });
      if (!result.rejects.empty()) std::cerr << result.rejects.size() << " rejected entries\n";
    } else if (*describe) {
      describe_cov.load();
      const auto raw = read_series_dir(series_dir);
      std::vector<NetworkSummary> rows;
      for (const auto& net : raw) rows.push_back(summarize(net));
      write_table(out_dir / "table1_descriptives.csv", [&](std::ostream& s) { write_summary_table(s, rows); });
      if (describe_cov.panel) {
        write_table(out_dir / "fig1_democracy.csv",
                    [&](std::ostream& s) { write_democracy_csv(s, democracy_summary(*describe_cov.panel)); });
      }
    } else if (*backbone) {
      const auto levels = config && levels_text == "0.5,0.25,0.05" ? config->trim_levels : parse_list(levels_text);
      const auto raw = read_series_dir(series_dir);
      std::ostringstream report_csv;
      bool header = true;
      for (const auto& net : raw) {
        const DisparityScores scores = disparity_alpha(net);
        write_trim_report(report_csv, net.year(), trim_report(net, levels), header);
        header = false;
        for (double level : levels) {
          const ValuedNetwork kept = to_valued(extract_backbone(net, scores, level));
          write_table(out_dir / fmt::format("backbone_{}_{:.2f}.csv", net.year(), level),
                      [&](std::ostream& s) { write_adjacency_csv(s, kept); });
        }
      }
      write_file(out_dir / "trim_report.csv", report_csv.str());
    } else if (*simulate) {
      sim_cov.load();
      const ModelSpec spec = parse_model_spec(slurp(model_path));
      NodeList node_list;
      std::optional<ValuedNetwork> start;
      if (!start_path.empty()) {
        start = read_adjacency_csv(fs::path(start_path), year);
        node_list = start->nodes();
      } else if (sim_cov.panel) {
        node_list = sim_cov.panel->nodes();
      } else if (nodes > 0) {
        node_list = numbered_nodes(nodes);
      } else {
        throw std::invalid_argument("simulate needs --net, --panel or --nodes");
      }
      const Model model(spec, sim_cov.data(node_list, year));
      const auto theta = parse_theta(slurp(theta_path), model.labels());
      SamplerConfig sc;
      const std::size_t dyads = std::max<std::size_t>(dyad_count(node_list.size()), 1);
      sc.burn_in = burn_in ? burn_in : 10 * dyads;
      sc.interval = interval ? interval : dyads;
      sc.sample_count = draws;
      sc.seed = g.seed;
      sc.threads = g.threads;
      SampleBatch batch;
      if (spec.mode == ModelMode::binary) {
        const BinaryNetwork s = start ? binarize(*start, 1) : BinaryNetwork(node_list);
        batch = sample_binary(model, theta, s, sc);
      } else {
        const ValuedNetwork s = start ? *start : ValuedNetwork(node_list);
        batch = sample_valued(model, theta, s, sc);
      }
      write_table(out_dir / "simulated_statistics.csv", [&](std::ostream& s) {
        s << fmt::format("{}\n", fmt::join(model.labels(), ","));
        for (Eigen::Index r = 0; r < batch.statistics.rows(); ++r) {
          for (Eigen::Index c = 0; c < batch.statistics.cols(); ++c) s << (c ? "," : "") << batch.statistics(r, c);
          s << '\n';
        }
      });
      std::cerr << fmt::format("acceptance rate {:.4f}\n", batch.acceptance_rate);
    } else if (*fit_tergm) {
      tergm_cov.load();
      const ModelSpec spec = parse_model_spec(slurp(model_path));
      const NetworkSeries series = load_series(series_dir, tergm_cov, reference_year);
      std::vector<BinaryNetwork> binary;
      std::vector<ModelData> data;
      for (const auto& net : series.networks()) {
        binary.push_back(binarize(net, threshold));
        data.push_back(tergm_cov.data(series.nodes(), net.year()));
      }
      BootstrapOptions opts;
      opts.replications = reps;
      opts.seed = g.seed;
      opts.threads = g.threads;
      const BootstrapResult fit = fit_tergm_bootstrap(spec, binary, data, opts);
      write_file(out_path.empty() ? out_dir / "tergm.json" : fs::path(out_path), bootstrap_json(fit));
      write_table(out_dir / "table2_tergm.csv", [&](std::ostream& s) { write_tergm_table(s, fit); });
    } else if (*fit_vergm) {
      vergm_cov.load();
      const ModelSpec spec = parse_model_spec(slurp(model_path));
      ValuedNetwork net = read_adjacency_csv(fs::path(net_path), year);
      if (quantize) {
        QuantizeResult q = quantize_weights(net, spec.max_value);
        for (const auto& w : q.warnings) std::cerr << "warning: " << w << '\n';
        net = std::move(q.network);
      }
      const Model model(spec, vergm_cov.data(net.nodes(), year));
      McmleOptions opts;
      opts.samples = samples;
      opts.seed = g.seed;
      opts.threads = g.threads;
      const FitResult fit = fit_vergm_mcmle(model, net, opts);
      write_file(out_path.empty() ? out_dir / fmt::format("vergm_{}.json", year) : fs::path(out_path),
                 fit_json(fit));
      write_table(out_dir / fmt::format("table3_vergm_{}.csv", year),
                  [&](std::ostream& s) { write_vergm_table(s, {{year, fit}}); });
      if (fit.sample_statistics.rows() > fit.sample_statistics.cols()) {
        const Eigen::VectorXd vif = vif_diagnostics(fit.sample_statistics);
        write_table(out_dir / fmt::format("vif_{}.csv", year), [&](std::ostream& s) {
          s << "label,vif\n";
          for (Eigen::Index k = 0; k < vif.size(); ++k) s << fit.labels[static_cast<std::size_t>(k)] << ',' << vif[k] << '\n';
        });
      }
      if (!fit.converged) std::cerr << "warning: " << fit.diagnostic << '\n';
    } else if (*gof) {
      gof_cov.load();
      const ModelSpec spec = parse_model_spec(slurp(model_path));
      const NetworkSeries series = load_series(series_dir, gof_cov, 0);
      std::vector<BinaryNetwork> binary;
      std::vector<ModelData> data;
      for (const auto& net : series.networks()) {
        binary.push_back(binarize(net, threshold));
        data.push_back(gof_cov.data(series.nodes(), net.year()));
      }
      const auto periods = tergm_periods(binary, data);
      const Model model(spec, periods.back().data);
      const json fit_doc = json::parse(slurp(fit_path));
      FitResult fit;
      fit.labels = model.labels();
      const auto theta = parse_theta(
          json{{"labels", fit_doc.at("labels")}, {"values", fit_doc.contains("point_estimates") ? fit_doc.at("point_estimates") : fit_doc.at("estimates")}}.dump(), model.labels());
      fit.coefficients = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
      fit.converged = fit_doc.at("flags").value("converged", false);
      GofOptions opts;
      opts.simulations = simulations;
      opts.seed = g.seed;
      opts.threads = g.threads;
      opts.allow_nonconverged = allow_nonconverged;
      const GofReport r = gof_binary(fit, model, periods.back().network, opts);
      for (const GofFamily* f : {&r.degree, &r.esp, &r.geodesic})
        write_table(out_dir / ("gof_" + f->name + ".csv"), [&](std::ostream& s) { write_gof_csv(s, *f); });
      write_file(out_dir / "fig4_gof.svg", gof_svg(r));
      std::cerr << fmt::format("coverage {:.3f} over informative bins\n", r.coverage());
    } else if (*layout) {
      const ValuedNetwork net = read_adjacency_csv(fs::path(net_path));
      const Layout l = layout_fr(binarize(net, threshold), g.seed, {iterations, 1.0});
      write_table(out_dir / "layout.csv", [&](std::ostream& s) {
        s << "node,x,y,visible\n";
        for (std::size_t i = 0; i < net.size(); ++i)
          s << fmt::format("{},{:.6f},{:.6f},{}\n", net.nodes()[i], l.x[i], l.y[i], l.visible[i] ? 1 : 0);
      });
    } else if (*synth) {
      synth_config.seed = g.seed;
      if (config) synth_config.presence_theta = config->synth_theta;
      if (target_density) synth_config = calibrate_density(synth_config, *target_density);
      const SyntheticData data = generate_synthetic(synth_config);
      for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
      write_table(out_dir / "publications.csv", [&](std::ostream& s) { write_publications_csv(s, data.publications); });
      write_table(out_dir / "panel.csv", [&](std::ostream& s) { write_panel_csv(s, data.panel); });
      write_table(out_dir / "distances.csv", [&](std::ostream& s) {
        write_square_csv(s, data.distances_km);
      });
      for (const auto& net : data.series.networks())
        write_table(out_dir / fmt::format("net_{}.csv", net.year()),
                    [&](std::ostream& s) { write_adjacency_csv(s, net); });
      write_file(out_dir / "presence_model.json", model_spec_json(synth_config.presence));
      write_file(out_dir / "presence_theta.json", json(data.presence_theta).dump());
    } else if (*report) {
      report_cov.load();
      const NetworkSeries series = load_series(series_dir, report_cov, 0);
      const auto levels = parse_list(levels_text);
      ReportInputs in;
      for (const auto& net : series.networks()) {
        in.summaries.push_back(summarize(net));
        in.trims[net.year()] = trim_report(net, levels);
      }
      if (report_cov.panel) in.democracy = democracy_summary(*report_cov.panel);
      if (!tergm_fit_path.empty()) {
        const json doc = json::parse(slurp(tergm_fit_path));
        BootstrapResult b;
        b.labels = doc.at("labels").get<std::vector<std::string>>();
        auto vec = [&](const char* key) {
          Eigen::VectorXd v(static_cast<Eigen::Index>(b.labels.size()));
          for (std::size_t k = 0; k < b.labels.size(); ++k) {
            const auto& cell = doc.at(key)[k];
            v[static_cast<Eigen::Index>(k)] = cell.is_null() ? std::nan("") : cell.get<double>();
          }
          return v;
        };
        b.mean = vec("estimates");
        b.ci_low = vec("ci_low");
        b.ci_high = vec("ci_high");
        b.significant = doc.at("significant").get<std::vector<bool>>();
        in.tergm = std::move(b);
      }
      for (const auto& path : vergm_fit_paths) {
        const json doc = json::parse(slurp(path));
        const std::string stem = fs::path(path).stem().string();
        const int fit_year = std::stoi(stem.substr(stem.find_last_of('_') + 1));
        FitResult f;
        f.labels = doc.at("labels").get<std::vector<std::string>>();
        const auto n = static_cast<Eigen::Index>(f.labels.size());
        f.coefficients.resize(n);
        f.standard_errors.resize(n);
        f.p_values.resize(n);
        for (Eigen::Index k = 0; k < n; ++k) {
          auto get = [&](const char* key) {
            const auto& c = doc.at(key)[static_cast<std::size_t>(k)];
            return c.is_null() ? std::nan("") : c.get<double>();
          };
          f.coefficients[k] = get("estimates");
          f.standard_errors[k] = get("standard_errors");
          f.p_values[k] = get("p_values");
        }
        in.vergm[fit_year] = std::move(f);
      }
      const ValuedNetwork& last = series.networks().back();
      std::vector<double> libdem;
      for (const auto& node : series.nodes())
        libdem.push_back(report_cov.panel ? report_cov.panel->numeric(node, last.year(), "libdem") : std::nan(""));
      in.networks.push_back({fmt::format("{}_full", last.year()), fmt::format("Untrimmed network {}", last.year()),
                             binarize(last, 1), libdem});
      for (double level : levels) {
        in.networks.push_back({fmt::format("{}_trim_{:.2f}", last.year(), level),
                               fmt::format("Trimmed network {} (level {:.2f})", last.year(), level),
                               extract_backbone(last, level), libdem});
      }
      in.layout_seed = g.seed;
      const ReportOutput r = render_report(in, out_dir);
      for (const auto& f : r.files) std::cerr << "wrote " << f.string() << '\n';
      for (const auto& s : r.skipped) std::cerr << "skipped " << s << '\n';
    } else if (*run) {
      PipelineConfig c = config.value_or(PipelineConfig{});
      if (app.count("--seed")) c.seed = g.seed;
      if (app.count("--threads")) c.threads = g.threads;
      const RunSummary s = run_pipeline(c, out_dir);
      for (const auto& f : s.files) std::cerr << "wrote " << f.string() << '\n';
      for (const auto& n : s.notes) std::cerr << "note: " << n << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
