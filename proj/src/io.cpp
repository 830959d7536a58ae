#include "rdode/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "rdode/errors.hpp"

namespace rdode {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& text) {
  size_t consumed = 0;
  const double value = std::stod(text, &consumed);
  if (consumed != text.size()) throw InvalidParams("malformed numeric field '" + text + "'");
  return value;
}

}  // namespace

std::string format_g17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_steady_csv(const std::string& path, const SteadyState& steady, const Grid& grid) {
  const int m = steady.field.m(), k = steady.field.k(), n = steady.field.n();
  if (n != grid.n) throw DimensionMismatch("steady state node count does not match the grid");
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "x";
  for (int a = 0; a < m; ++a) out << ",u_" << a + 1;
  for (int b = 0; b < k; ++b) out << ",v_" << b + 1;
  out << ",branch_label\n";
  for (int i = 0; i < n; ++i) {
    out << format_g17(grid.nodes[i]);
    for (int a = 0; a < m; ++a) out << "," << format_g17(steady.field.u(a, i));
    for (int b = 0; b < k; ++b) out << "," << format_g17(steady.field.v(b, i));
    out << "," << (steady.branch_labels.empty() ? std::string("-") : steady.branch_labels[i])
        << "\n";
  }
}

SteadyState load_steady_csv(const std::string& path, int* grid_n_out) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw InvalidParams("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "x" || header.back() != "branch_label")
    throw InvalidParams("'" + path + "' header must be x,u_*,v_*,branch_label");
  int m = 0, k = 0;
  for (size_t c = 1; c + 1 < header.size(); ++c) {
    if (header[c] == "u_" + std::to_string(m + 1) && k == 0) ++m;
    else if (header[c] == "v_" + std::to_string(k + 1)) ++k;
    else throw InvalidParams("unexpected column '" + header[c] + "' in '" + path + "'");
  }
  if (m < 1 || k < 1) throw InvalidParams("'" + path + "' must have u and v columns");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw InvalidParams("row with " + std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(header.size()));
    std::vector<double> values(fields.size() - 1);
    for (size_t c = 0; c + 1 < fields.size(); ++c) values[c] = parse_double(fields[c]);
    rows.push_back(std::move(values));
    labels.push_back(fields.back());
  }
  const int n = static_cast<int>(rows.size());
  if (n < 2) throw InvalidParams("'" + path + "' must have at least 2 node rows");

  SteadyState steady;
  steady.field = StateField::zero(m, k, n);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < m; ++a) steady.field.u(a, i) = rows[i][1 + a];
    for (int b = 0; b < k; ++b) steady.field.v(b, i) = rows[i][1 + m + b];
  }
  bool labeled = false;
  for (const std::string& label : labels) labeled = labeled || label != "-";
  if (labeled) steady.branch_labels = labels;
  if (grid_n_out) *grid_n_out = n;
  return steady;
}

void write_spectrum_csv(const std::string& path, const SpectrumReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "re,im,kind\n";
  for (const Complex& z : report.essential_samples)
    out << format_g17(z.real()) << "," << format_g17(z.imag()) << ",essential\n";
  for (const Complex& z : report.discrete_eigs)
    out << format_g17(z.real()) << "," << format_g17(z.imag()) << ",discrete\n";
  for (const Complex& z : report.essential_cluster_eigs)
    out << format_g17(z.real()) << "," << format_g17(z.imag()) << ",discarded\n";
}

void write_trace_csv(const std::string& path, const SimulationTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "t,sup_norm,l2_norm\n";
  for (size_t i = 0; i < trace.times.size(); ++i)
    out << format_g17(trace.times[i]) << "," << format_g17(trace.sup_norms[i]) << ","
        << format_g17(trace.l2_norms[i]) << "\n";
}

}  // namespace rdode
