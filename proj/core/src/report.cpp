#include "collabnet/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "collabnet/io.hpp"
#include "collabnet/layout.hpp"

namespace collabnet {

namespace {

constexpr std::array<std::array<int, 3>, 11> kRdYlBu{{{165, 0, 38},
                                                       {215, 48, 39},
                                                       {244, 109, 67},
                                                       {253, 174, 97},
                                                       {254, 224, 144},
                                                       {255, 255, 191},
                                                       {224, 243, 248},
                                                       {171, 217, 233},
                                                       {116, 173, 209},
                                                       {69, 117, 180},
                                                       {49, 54, 149}}};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_open(double width, double height) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
}

std::string fixed(double v) { return std::isnan(v) ? std::string("NA") : fmt::format("{:.3f}", v); }

}  // namespace

std::string rdylbu(double value) {
  if (std::isnan(value)) return "#999999";
  const double v = std::clamp(value, 0.0, 1.0) * 10.0;
  const auto lo = static_cast<std::size_t>(std::min(std::floor(v), 9.0));
  const double f = v - static_cast<double>(lo);
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(kRdYlBu[lo][c] + f * (kRdYlBu[lo + 1][c] - kRdYlBu[lo][c])));
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

double node_radius(std::size_t degree, std::size_t max_degree) {
  if (max_degree == 0) return 3.0;
  return 3.0 + 9.0 * std::sqrt(static_cast<double>(degree) / static_cast<double>(max_degree));
}

void write_tergm_table(std::ostream& out, const BootstrapResult& fit) {
  out << "label,estimate,ci_low,ci_high,significant,display\n";
  for (std::size_t k = 0; k < fit.labels.size(); ++k) {
    const auto e = static_cast<Eigen::Index>(k);
    const std::string star = fit.significant[k] ? "*" : "";
    out << fmt::format("{},{},{},{},{},\"{} [{}, {}]{}\"\n", fit.labels[k], fixed(fit.mean[e]),
                       fixed(fit.ci_low[e]), fixed(fit.ci_high[e]), fit.significant[k] ? 1 : 0,
                       fixed(fit.mean[e]), fixed(fit.ci_low[e]), fixed(fit.ci_high[e]), star);
  }
}

void write_vergm_table(std::ostream& out, const std::map<int, FitResult>& fits) {
  std::vector<std::string> labels;
  for (const auto& [year, fit] : fits)
    for (const auto& l : fit.labels)
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  out << "label";
  for (const auto& [year, fit] : fits) out << ',' << year;
  out << '\n';
  for (const auto& label : labels) {
    out << label;
    for (const auto& [year, fit] : fits) {
      const auto it = std::find(fit.labels.begin(), fit.labels.end(), label);
      out << ',';
      if (it == fit.labels.end()) continue;
      const auto k = it - fit.labels.begin();
      out << fmt::format("{}{} ({})", fixed(fit.coefficients[k]), significance_stars(fit.p_values[k]),
                         fixed(fit.standard_errors[k]));
    }
    out << '\n';
  }
}

std::string network_svg(const NetworkFigure& figure, std::uint64_t seed, std::size_t iterations) {
  const BinaryNetwork& net = figure.network;
  const double size = 600.0;
  const double margin = 30.0;
  std::string svg = svg_open(size + 2 * margin, size + 2 * margin + 40);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" font-family=\"sans-serif\" font-size=\"16\" "
                     "text-anchor=\"middle\">{}</text>\n",
                     (size + 2 * margin) / 2, escape(figure.title));
  if (net.size() == 0) return svg + "</svg>\n";
  const Layout layout = layout_fr(net, seed, {iterations, 1.0});
  auto px = [&](std::size_t i) { return margin + (layout.x[i] + 0.5) * size; };
  auto py = [&](std::size_t i) { return 40 + margin + (layout.y[i] + 0.5) * size; };
  std::size_t max_degree = 0;
  for (std::size_t i = 0; i < net.size(); ++i) max_degree = std::max(max_degree, net.degree(i));

  svg += "<g stroke=\"#888888\" stroke-opacity=\"0.35\" stroke-width=\"0.6\">\n";
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j)
      if (net.has_edge(i, j))
        svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", px(i), py(i),
                           px(j), py(j));
  svg += "</g>\n<g stroke=\"#333333\" stroke-width=\"0.5\">\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!layout.visible[i]) continue;
    const double dem = i < figure.libdem.size() ? figure.libdem[i] : std::nan("");
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\"><title>{}</title></circle>\n",
                       px(i), py(i), node_radius(net.degree(i), max_degree), rdylbu(dem),
                       escape(net.nodes()[i]));
  }
  svg += "</g>\n";
  // Legend
  for (int s = 0; s <= 10; ++s) {
    svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"16\" height=\"10\" fill=\"{}\"/>\n",
                       margin + s * 16.0, size + 2 * margin + 25, rdylbu(s / 10.0));
  }
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\">"
                     "liberal democracy 0 to 1</text>\n",
                     margin + 11 * 16.0 + 6, size + 2 * margin + 34);
  return svg + "</svg>\n";
}

std::string democracy_svg(const std::vector<DemocracyChange>& rows) {
  const double bar = 8.0;
  const double plot_h = 200.0;
  const double left = 40.0;
  const double width = left + bar * static_cast<double>(std::max<std::size_t>(rows.size(), 1)) + 20;
  std::string svg = svg_open(width, 2 * (plot_h + 90));

  auto panel = [&](double top, const std::string& title, std::vector<const DemocracyChange*> order,
                   auto value, auto colour) {
    double lo = 0.0;
    double hi = 0.0;
    for (const auto* r : order) {
      const double v = value(*r);
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo <= 0) hi = lo + 1.0;
    const auto y_of = [&](double v) { return top + 20 + (hi - v) / (hi - lo) * plot_h; };
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
                       left, top + 12, escape(title));
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.2f}\" x2=\"{:.1f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", left,
                       y_of(0.0), width - 10, y_of(0.0));
    for (std::size_t k = 0; k < order.size(); ++k) {
      const double v = value(*order[k]);
      if (std::isnan(v)) continue;
      const double x = left + bar * static_cast<double>(k);
      const double y0 = y_of(std::max(v, 0.0));
      const double y1 = y_of(std::min(v, 0.0));
      svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.2f}\" width=\"{:.1f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", x,
                         y0, bar - 1, y1 - y0, colour(*order[k]));
      svg += fmt::format(
          "<text x=\"{0:.1f}\" y=\"{1:.1f}\" font-family=\"sans-serif\" font-size=\"6\" "
          "transform=\"rotate(90 {0:.1f} {1:.1f})\">{2}</text>\n",
          x + 2, top + plot_h + 26, escape(order[k]->node));
    }
  };

  std::vector<const DemocracyChange*> by_mean;
  for (const auto& r : rows) by_mean.push_back(&r);
  std::stable_sort(by_mean.begin(), by_mean.end(),
                   [](const auto* a, const auto* b) { return a->mean > b->mean; });
  panel(0.0, "a. mean liberal democracy", by_mean, [](const DemocracyChange& r) { return r.mean; },
        [](const DemocracyChange& r) { return rdylbu(r.mean); });

  std::vector<const DemocracyChange*> by_change;
  for (const auto& r : rows)
    if (!r.single_year) by_change.push_back(&r);
  std::stable_sort(by_change.begin(), by_change.end(),
                   [](const auto* a, const auto* b) { return a->difference > b->difference; });
  panel(plot_h + 90, "b. change in liberal democracy (last minus first year)", by_change,
        [](const DemocracyChange& r) { return r.difference; },
        [](const DemocracyChange& r) { return rdylbu(r.last); });
  return svg + "</svg>\n";
}

std::string gof_svg(const GofReport& report) {
  const double pw = 300.0;
  const double ph = 220.0;
  const double pad = 40.0;
  std::string svg = svg_open(3 * (pw + pad) + pad, ph + 2 * pad + 20);
  const std::array<const GofFamily*, 3> families{&report.degree, &report.esp, &report.geodesic};
  const std::array<const char*, 3> titles{"degree", "edge-wise shared partners", "minimum geodesic distance"};
  for (std::size_t f = 0; f < 3; ++f) {
    const GofFamily& fam = *families[f];
    const double x0 = pad + static_cast<double>(f) * (pw + pad);
    const double y0 = pad;
    double total = 0.0;
    for (double v : fam.observed) total += v;
    if (total <= 0) total = 1.0;
    double top = 0.0;
    for (std::size_t b = 0; b < fam.bins.size(); ++b)
      top = std::max({top, fam.observed[b] / total, fam.q95[b] / total});
    if (top <= 0) top = 1.0;
    const std::size_t B = std::max<std::size_t>(fam.bins.size(), 1);
    auto X = [&](std::size_t b) { return x0 + (static_cast<double>(b) + 0.5) * pw / static_cast<double>(B); };
    auto Y = [&](double v) { return y0 + ph - v / total / top * ph; };
    svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
                       "stroke=\"#444444\"/>\n",
                       x0, y0, pw, ph);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       x0 + pw / 2, y0 - 10, titles[f]);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\">"
                       "proportion</text>\n",
                       x0, y0 + ph + 30);
    svg += "<g stroke=\"#7f7f7f\">\n";
    for (std::size_t b = 0; b < fam.bins.size(); ++b) {
      svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", X(b),
                         Y(fam.q05[b]), Y(fam.q95[b]));
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1.5\" fill=\"#7f7f7f\"/>\n", X(b), Y(fam.q50[b]));
    }
    svg += "</g>\n<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (std::size_t b = 0; b < fam.bins.size(); ++b) svg += fmt::format("{:.2f},{:.2f} ", X(b), Y(fam.observed[b]));
    svg += "\"/>\n";
    const std::size_t step = std::max<std::size_t>(1, fam.bins.size() / 10);
    for (std::size_t b = 0; b < fam.bins.size(); b += step) {
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"9\" "
                         "text-anchor=\"middle\">{}</text>\n",
                         X(b), y0 + ph + 12, escape(fam.bins[b]));
    }
  }
  return svg + "</svg>\n";
}

ReportOutput render_report(const ReportInputs& in, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ReportOutput out;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    out.files.push_back(dir / name);
  };
  auto table = [&](const std::string& name, auto writer) {
    std::ostringstream s;
    writer(s);
    emit(name, s.str());
  };

  if (!in.summaries.empty()) {
    table("table1_descriptives.csv", [&](std::ostream& s) { write_summary_table(s, in.summaries); });
  } else {
    out.skipped.push_back("table1_descriptives.csv: no network summaries");
  }
  if (!in.democracy.empty()) {
    table("fig1_democracy.csv", [&](std::ostream& s) { write_democracy_csv(s, in.democracy); });
    emit("fig1_democracy.svg", democracy_svg(in.democracy));
  } else {
    out.skipped.push_back("fig1_democracy: no democracy panel");
  }
  if (!in.trims.empty()) {
    table("trim_report.csv", [&](std::ostream& s) {
      bool header = true;
      for (const auto& [year, rows] : in.trims) {
        write_trim_report(s, year, rows, header);
        header = false;
      }
    });
  } else {
    out.skipped.push_back("trim_report.csv: no backbone trimming results");
  }
  if (in.tergm) {
    table("table2_tergm.csv", [&](std::ostream& s) { write_tergm_table(s, *in.tergm); });
  } else {
    out.skipped.push_back("table2_tergm.csv: no temporal fit");
  }
  if (!in.vergm.empty()) {
    table("table3_vergm.csv", [&](std::ostream& s) { write_vergm_table(s, in.vergm); });
  } else {
    out.skipped.push_back("table3_vergm.csv: no valued fits");
  }
  if (!in.vif.empty()) {
    table("vif.csv", [&](std::ostream& s) {
      s << "year,label,vif\n";
      for (const auto& [year, v] : in.vif) {
        const auto fit = in.vergm.find(year);
        for (Eigen::Index k = 0; k < v.size(); ++k) {
          const std::string label = fit != in.vergm.end() && static_cast<std::size_t>(k) < fit->second.labels.size()
                                        ? fit->second.labels[static_cast<std::size_t>(k)]
                                        : fmt::format("stat{}", k);
          s << fmt::format("{},{},{}\n", year, label, std::isinf(v[k]) ? std::string("Inf") : fixed(v[k]));
        }
      }
    });
  } else {
    out.skipped.push_back("vif.csv: no VIF diagnostics");
  }
  if (in.gof) {
    for (const GofFamily* f : {&in.gof->degree, &in.gof->esp, &in.gof->geodesic}) {
      table("gof_" + f->name + ".csv", [&](std::ostream& s) { write_gof_csv(s, *f); });
    }
    emit("fig4_gof.svg", gof_svg(*in.gof));
  } else {
    out.skipped.push_back("fig4_gof: no goodness-of-fit report");
  }
  if (in.networks.empty()) out.skipped.push_back("network figures: no networks supplied");
  for (const auto& fig : in.networks) {
    emit("network_" + fig.name + ".svg", network_svg(fig, in.layout_seed, in.layout_iterations));
  }

  std::string notes;
  for (const auto& s : out.skipped) notes += "skipped " + s + "\n";
  emit("skipped.txt", notes);
  return out;
}

}  // namespace collabnet
