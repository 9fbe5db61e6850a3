#include "imscat/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace imscat {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

void expect_header(std::istream& in, const std::string& header, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::runtime_error("'" + path.string() + "': expected header '" + header + "'");
  }
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

void write_medium_csv(const std::filesystem::path& path, const Medium& medium) {
  auto out = open_out(path);
  out << "m1,m2,x,y,re_q,im_q\n";
  const CellGrid& g = medium.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec2& c = g.center(i);
    out << fmt::format("{},{},{},{},{},{}\n", g.m1_of(i), g.m2_of(i), c.x(), c.y(), medium[i].real(), medium[i].imag());
  }
}

Medium read_medium_csv(const std::filesystem::path& path, const CellGrid& grid) {
  auto in = open_in(path);
  expect_header(in, "m1,m2,x,y,re_q,im_q", path);
  CVector values = CVector::Zero(static_cast<Eigen::Index>(grid.size()));
  std::vector<bool> seen(grid.size(), false);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw std::runtime_error("'" + path.string() + "': malformed row '" + line + "'");
    const std::size_t idx = grid.index(std::stoi(f[0]), std::stoi(f[1]));
    values[static_cast<Eigen::Index>(idx)] = Complex(std::stod(f[4]), std::stod(f[5]));
    seen[idx] = true;
  }
  for (bool s : seen) {
    if (!s) throw std::runtime_error("'" + path.string() + "': missing cells");
  }
  return Medium(grid, std::move(values));
}

void write_farfield_csv(const std::filesystem::path& path, const FarFieldSet& data) {
  auto out = open_out(path);
  out << "j,n,re,im\n";
  for (Eigen::Index n = 0; n < data.values.cols(); ++n) {
    for (Eigen::Index j = 0; j < data.values.rows(); ++j) {
      out << fmt::format("{},{},{},{}\n", j + 1, n + 1, data.values(j, n).real(), data.values(j, n).imag());
    }
  }
}

FarFieldSet read_farfield_csv(const std::filesystem::path& path, int obs_count, int inc_count) {
  auto in = open_in(path);
  expect_header(in, "j,n,re,im", path);
  FarFieldSet data;
  data.obs_count = obs_count;
  data.inc_count = inc_count;
  data.values = CMatrix::Zero(obs_count, inc_count);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw std::runtime_error("'" + path.string() + "': malformed row '" + line + "'");
    const int j = std::stoi(f[0]);
    const int n = std::stoi(f[1]);
    if (j < 1 || j > obs_count || n < 1 || n > inc_count) {
      throw DimensionMismatch("'" + path.string() + "': direction index out of range");
    }
    data.values(j - 1, n - 1) = Complex(std::stod(f[2]), std::stod(f[3]));
    ++rows;
  }
  if (rows != static_cast<std::size_t>(obs_count) * inc_count) {
    throw DimensionMismatch("'" + path.string() + "': expected J*N rows");
  }
  return data;
}

void write_farfield_meta(const std::filesystem::path& path, const FarFieldMeta& meta) {
  nlohmann::ordered_json j;
  j["k"] = meta.k;
  j["J"] = meta.J;
  j["N"] = meta.N;
  j["sigma"] = meta.sigma;
  j["seed"] = meta.seed;
  j["S"] = meta.S;
  j["M"] = meta.M;
  j["fine_grid"] = meta.fine_grid;
  j["period"] = meta.period;
  j["shape"] = meta.shape;
  j["rng"] = meta.rng;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

FarFieldMeta read_farfield_meta(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto j = nlohmann::json::parse(in);
  FarFieldMeta meta;
  meta.k = j.at("k").get<double>();
  meta.J = j.at("J").get<int>();
  meta.N = j.at("N").get<int>();
  meta.sigma = j.at("sigma").get<double>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.S = j.at("S").get<double>();
  meta.M = j.at("M").get<int>();
  meta.fine_grid = j.value("fine_grid", 0);
  meta.period = j.value("period", 0.0);
  meta.shape = j.value("shape", std::string{});
  meta.rng = j.value("rng", meta.rng);
  return meta;
}

void write_jacobian_csv(const std::filesystem::path& path, const LinearizedOperator& op) {
  auto out = open_out(path);
  out << "n,j,m,re,im\n";
  for (std::size_t n = 0; n < op.blocks.size(); ++n) {
    const CMatrix& b = op.blocks[n];
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      for (Eigen::Index m = 0; m < b.cols(); ++m) {
        out << fmt::format("{},{},{},{},{}\n", n + 1, j + 1, m, b(j, m).real(), b(j, m).imag());
      }
    }
  }
}

}  // namespace imscat
