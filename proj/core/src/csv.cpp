#include "uwfd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uwfd {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_num(const std::string& s) {
  if (s == "nan") return std::nan("");
  return std::stod(s);
}

std::ifstream open_with_header(const std::filesystem::path& path, const char* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::runtime_error(path.string() + ": unexpected CSV header");
  return in;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : table) {
    out << to_string(r.mode) << ',' << num(r.sweep_value) << ',' << num(r.ber) << ',' << r.errors << ','
        << r.symbols << ',' << num(r.rho_c_hat) << ',' << num(r.rho_c_tilde) << ',' << num(r.rho_h_hat)
        << ',' << num(r.rho_h_bar) << ',' << num(r.rho_r_hat) << ',' << r.seed << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table) {
  write_file(path, [&](std::ostream& out) { write_sweep_csv(out, table); });
}

SweepTable read_sweep_csv(const std::filesystem::path& path) {
  auto in = open_with_header(path, kSweepCsvHeader);
  SweepTable table;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 11)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected 11 columns");
    SweepRow r;
    r.mode = parse_mode(cells[0]);
    r.sweep_value = parse_num(cells[1]);
    r.ber = parse_num(cells[2]);
    r.errors = std::stoull(cells[3]);
    r.symbols = std::stoull(cells[4]);
    r.rho_c_hat = parse_num(cells[5]);
    r.rho_c_tilde = parse_num(cells[6]);
    r.rho_h_hat = parse_num(cells[7]);
    r.rho_h_bar = parse_num(cells[8]);
    r.rho_r_hat = parse_num(cells[9]);
    r.seed = std::stoull(cells[10]);
    table.push_back(r);
  }
  return table;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& samples) {
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& s : samples) {
    out << s.n << ',' << num(s.truth.real()) << ',' << num(s.truth.imag()) << ',' << num(s.estimated.real())
        << ',' << num(s.estimated.imag()) << ',' << num(s.damped.real()) << ',' << num(s.damped.imag())
        << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectorySample>& samples) {
  write_file(path, [&](std::ostream& out) { write_trajectory_csv(out, samples); });
}

std::vector<TrajectorySample> read_trajectory_csv(const std::filesystem::path& path) {
  auto in = open_with_header(path, kTrajectoryCsvHeader);
  std::vector<TrajectorySample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 7) throw std::runtime_error(path.string() + ": expected 7 columns");
    out.push_back({std::stol(c[0]),
                   {parse_num(c[1]), parse_num(c[2])},
                   {parse_num(c[3]), parse_num(c[4])},
                   {parse_num(c[5]), parse_num(c[6])}});
  }
  return out;
}

}  // namespace uwfd
