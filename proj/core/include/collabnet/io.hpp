#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "collabnet/graph.hpp"

namespace collabnet {

/// Comma split with surrounding whitespace trimmed; no quoting (node codes
/// and numbers never contain commas).
std::vector<std::string> split_csv_line(std::string_view line, char sep = ',');
std::string trim(std::string_view s);

/// Parses a numeric cell; empty, "NA" and "NaN" are missing.
double parse_cell(const std::string& cell);

/// Square matrix with a header row of node codes. An optional leading
/// label column is accepted when each data row starts with a node code.
struct SquareMatrix {
  NodeList nodes;
  std::vector<double> values;  // row-major, NaN for missing cells

  std::size_t size() const noexcept { return nodes.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * nodes.size() + j]; }
};

SquareMatrix read_square_csv(std::istream& in);
SquareMatrix read_square_csv(const std::filesystem::path& path);
/// Writes the labelled form: blank corner cell, node codes as header and as
/// the first cell of each row.
void write_square_csv(std::ostream& out, const SquareMatrix& m);

/// Adjacency CSV: header of node codes, then n rows of n non-negative
/// integers.
ValuedNetwork read_adjacency_csv(std::istream& in, int year = 0);
ValuedNetwork read_adjacency_csv(const std::filesystem::path& path, int year = 0);
void write_adjacency_csv(std::ostream& out, const ValuedNetwork& net);
void write_adjacency_csv(const std::filesystem::path& path, const ValuedNetwork& net);

/// Edge-list CSV with columns year,i,j,weight (i and j are node codes).
/// Returns one network per year over the sorted union of node codes.
std::map<int, ValuedNetwork> read_edge_list_csv(std::istream& in);
void write_edge_list_csv(std::ostream& out, const std::vector<ValuedNetwork>& networks);

/// Panel CSV: node,year,libdem,gdp_pc,population,urbanization,authors,region.
/// Stored variables are libdem, ln_gdp_pc, ln_population, urbanization,
/// ln_authors (authors == 0 is missing) and the categorical region. Columns
/// are matched by header name, so a file that already carries ln_gdp_pc,
/// ln_population or ln_authors is read without transformation. libdem
/// outside [0,1] is rejected.
AttributePanel read_panel_csv(std::istream& in);
AttributePanel read_panel_csv(const std::filesystem::path& path);

/// Writes node,year,libdem,ln_gdp_pc,ln_population,urbanization,ln_authors,
/// region; missing cells are empty.
void write_panel_csv(std::ostream& out, const AttributePanel& panel);

/// Reads every net_<year>.csv in a directory, ordered by year.
std::vector<ValuedNetwork> read_series_dir(const std::filesystem::path& dir);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace collabnet
