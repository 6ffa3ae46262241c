#include "collabnet/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace collabnet {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

double parse_cell(const std::string& cell) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") return kMissing;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + cell + "'");
  }
  if (used != cell.size()) throw std::invalid_argument("not a number: '" + cell + "'");
  return v;
}

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!trim(line).empty()) return true;
  }
  return false;
}

}  // namespace

SquareMatrix read_square_csv(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw std::invalid_argument("empty matrix CSV");
  auto header = split_csv_line(line);
  // A blank first header cell marks a leading label column.
  const bool labelled = !header.empty() && header.front().empty();
  if (labelled) header.erase(header.begin());
  SquareMatrix m;
  m.nodes = header;
  const std::size_t n = header.size();
  m.values.reserve(n * n);
  std::size_t rows = 0;
  while (next_data_line(in, line)) {
    auto cells = split_csv_line(line);
    if (labelled || cells.size() == n + 1) {
      if (cells.front() != header[rows]) {
        throw std::invalid_argument("row label '" + cells.front() + "' does not match column '" +
                                    header[rows] + "'");
      }
      cells.erase(cells.begin());
    }
    if (cells.size() != n) {
      throw std::invalid_argument(fmt::format("matrix row {} has {} cells, expected {}", rows + 1,
                                              cells.size(), n));
    }
    for (const auto& c : cells) m.values.push_back(parse_cell(c));
    ++rows;
  }
  if (rows != n) throw std::invalid_argument(fmt::format("matrix has {} rows, expected {}", rows, n));
  return m;
}

SquareMatrix read_square_csv(const fs::path& path) {
  auto in = open_in(path);
  return read_square_csv(in);
}

void write_square_csv(std::ostream& out, const SquareMatrix& m) {
  for (const auto& node : m.nodes) out << ',' << node;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.nodes[i];
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << fmt::format("{}", m.at(i, j));
    out << '\n';
  }
}

ValuedNetwork read_adjacency_csv(std::istream& in, int year) {
  const SquareMatrix m = read_square_csv(in);
  const std::size_t n = m.size();
  ValuedNetwork net(m.nodes, year);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m.at(i, j);
      if (std::isnan(v) || v < 0 || v != std::floor(v)) {
        throw std::invalid_argument(fmt::format("adjacency entry ({}, {}) is not a non-negative "
                                                "integer", m.nodes[i], m.nodes[j]));
      }
      if (v != m.at(j, i)) {
        throw std::invalid_argument(
            fmt::format("adjacency matrix is not symmetric at ({}, {})", m.nodes[i], m.nodes[j]));
      }
      if (i == j && v != 0) {
        throw std::invalid_argument("adjacency matrix has a nonzero diagonal at " + m.nodes[i]);
      }
      if (i < j && v > 0) net.set_weight(i, j, static_cast<Weight>(v));
    }
  }
  return net;
}

ValuedNetwork read_adjacency_csv(const fs::path& path, int year) {
  auto in = open_in(path);
  return read_adjacency_csv(in, year);
}

void write_adjacency_csv(std::ostream& out, const ValuedNetwork& net) {
  const std::size_t n = net.size();
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << net.nodes()[i];
  out << '\n';
  std::string row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j) row += ',';
      row += std::to_string(net.weight(i, j));
    }
    out << row << '\n';
  }
}

void write_adjacency_csv(const fs::path& path, const ValuedNetwork& net) {
  auto out = open_out(path);
  write_adjacency_csv(out, net);
}

std::map<int, ValuedNetwork> read_edge_list_csv(std::istream& in) {
  struct Row {
    int year;
    std::string a, b;
    std::int64_t w;
  };
  std::vector<Row> rows;
  std::set<std::string> codes;
  std::string line;
  bool header = true;
  while (next_data_line(in, line)) {
    auto cells = split_csv_line(line);
    if (header) {
      header = false;
      if (cells.size() >= 1 && cells[0] == "year") continue;
    }
    if (cells.size() != 4) throw std::invalid_argument("edge list rows need year,i,j,weight");
    Row r{std::stoi(cells[0]), cells[1], cells[2], std::stoll(cells[3])};
    codes.insert(r.a);
    codes.insert(r.b);
    rows.push_back(std::move(r));
  }
  NodeList nodes(codes.begin(), codes.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
  std::map<int, std::vector<EdgeInput>> by_year;
  for (const auto& r : rows) by_year[r.year].push_back({index[r.a], index[r.b], r.w});
  std::map<int, ValuedNetwork> out;
  for (const auto& [year, edges] : by_year) out.emplace(year, build_network(nodes, edges, year));
  return out;
}

void write_edge_list_csv(std::ostream& out, const std::vector<ValuedNetwork>& networks) {
  out << "year,i,j,weight\n";
  for (const auto& net : networks)
    for (std::size_t i = 0; i < net.size(); ++i)
      for (std::size_t j = i + 1; j < net.size(); ++j)
        if (net.weight(i, j) > 0)
          out << net.year() << ',' << net.nodes()[i] << ',' << net.nodes()[j] << ','
              << net.weight(i, j) << '\n';
}

AttributePanel read_panel_csv(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw std::invalid_argument("empty panel CSV");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  for (const char* required : {"node", "year"}) {
    if (!col.count(required)) throw std::invalid_argument(std::string("panel CSV lacks column ") + required);
  }

  struct Source {
    const char* raw;
    const char* stored;
    bool log;
  };
  const Source sources[] = {{"libdem", "libdem", false},
                            {"gdp_pc", "ln_gdp_pc", true},
                            {"population", "ln_population", true},
                            {"urbanization", "urbanization", false},
                            {"authors", "ln_authors", true}};

  AttributePanel panel;
  std::size_t line_no = 1;
  while (next_data_line(in, line)) {
    ++line_no;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument(fmt::format("panel line {} has {} cells, expected {}", line_no,
                                              cells.size(), header.size()));
    }
    const std::string& node = cells[col["node"]];
    const int year = std::stoi(cells[col["year"]]);
    for (const auto& s : sources) {
      double v = kMissing;
      if (auto it = col.find(s.stored); it != col.end() && s.log) {
        v = parse_cell(cells[it->second]);
      } else if (auto raw = col.find(s.raw); raw != col.end()) {
        v = parse_cell(cells[raw->second]);
        // A zero count is a data artifact, never a real zero.
        if (s.log) v = (std::isnan(v) || v <= 0) ? kMissing : std::log(v);
      } else {
        continue;
      }
      if (std::string(s.stored) == "libdem" && !std::isnan(v) && (v < 0 || v > 1)) {
        throw std::invalid_argument(fmt::format("libdem {} outside [0,1] for {} {}", v, node, year));
      }
      panel.set_numeric(node, year, s.stored, v);
    }
    if (auto it = col.find("region"); it != col.end()) {
      panel.set_categorical(node, year, "region", cells[it->second]);
    }
  }
  return panel;
}

AttributePanel read_panel_csv(const fs::path& path) {
  auto in = open_in(path);
  return read_panel_csv(in);
}

void write_panel_csv(std::ostream& out, const AttributePanel& panel) {
  static const char* numeric[] = {"libdem", "ln_gdp_pc", "ln_population", "urbanization",
                                  "ln_authors"};
  out << "node,year,libdem,ln_gdp_pc,ln_population,urbanization,ln_authors,region\n";
  for (const auto& [node, by_year] : panel.rows()) {
    for (const auto& [year, _] : by_year) {
      out << node << ',' << year;
      for (const char* name : numeric) {
        const double v = panel.numeric(node, year, name);
        out << ',';
        if (!std::isnan(v)) out << fmt::format("{}", v);
      }
      out << ',' << panel.categorical(node, year, "region").value_or("") << '\n';
    }
  }
}

std::vector<ValuedNetwork> read_series_dir(const fs::path& dir) {
  static const std::regex pattern(R"(net_(-?\d+)\.csv)");
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) files.emplace_back(std::stoi(m[1]), entry.path());
  }
  if (files.empty()) throw std::invalid_argument("no net_<year>.csv files in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<ValuedNetwork> out;
  for (const auto& [year, path] : files) out.push_back(read_adjacency_csv(path, year));
  return out;
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace collabnet
