#pragma once

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "srf/operators.hpp"
#include "srf/solver.hpp"

namespace srf::io {

namespace fs = std::filesystem;

/// Shortest decimal form that still parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::ofstream open_out(const fs::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out)
    throw std::invalid_argument("cannot open " + path.string() + " for writing");
  return out;
}

inline std::ifstream open_in(const fs::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in)
    throw std::invalid_argument("cannot open " + path.string() + " for reading");
  return in;
}

// ---- CSV matrices: one row per line, comma separated, full precision ----

inline void write_matrix_csv(const fs::path& path, const Matrix& x) {
  std::ofstream out = open_out(path);
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << format_double(x(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

inline double parse_double_token(const std::string& token, const fs::path& path) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(path.string() + ": not a number: \"" + token + "\"");
  }
  while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
  if (used != token.size())
    throw std::invalid_argument(path.string() + ": trailing junk in \"" + token + "\"");
  return v;
}

inline Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) row.push_back(parse_double_token(token, path));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument(path.string() + ": ragged rows (" +
                                  std::to_string(row.size()) + " vs " +
                                  std::to_string(rows.front().size()) + " columns)");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument(path.string() + ": no data");
  Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return x;
}

inline void write_vector_csv(const fs::path& path, const Vector& v) {
  std::ofstream out = open_out(path);
  for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

inline Vector read_vector_csv(const fs::path& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.cols() != 1)
    throw std::invalid_argument(path.string() + ": expected a single column, got " +
                                std::to_string(m.cols()));
  return m.col(0);
}

// ---- Binary matrices: 16-byte header then doubles, all little-endian ----
// Header layout: "SRFM", u32 rows, u32 cols, 4 reserved zero bytes; payload
// is column-major. Only little-endian hosts are supported, which lets the
// buffers be written directly.
static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

inline void write_matrix_binary(const fs::path& path, const Matrix& x) {
  std::ofstream out = open_out(path, std::ios::binary);
  char header[16] = {'S', 'R', 'F', 'M'};
  const std::uint32_t n1 = static_cast<std::uint32_t>(x.rows());
  const std::uint32_t n2 = static_cast<std::uint32_t>(x.cols());
  std::memcpy(header + 4, &n1, 4);
  std::memcpy(header + 8, &n2, 4);
  out.write(header, sizeof(header));
  out.write(reinterpret_cast<const char*>(x.data()),
            static_cast<std::streamsize>(sizeof(double)) * x.size());
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

inline Matrix read_matrix_binary(const fs::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  char header[16];
  in.read(header, sizeof(header));
  if (!in || std::memcmp(header, "SRFM", 4) != 0)
    throw std::invalid_argument(path.string() + ": not a binary matrix file (bad magic)");
  std::uint32_t n1 = 0, n2 = 0;
  std::memcpy(&n1, header + 4, 4);
  std::memcpy(&n2, header + 8, 4);
  if (n1 == 0 || n2 == 0)
    throw std::invalid_argument(path.string() + ": degenerate shape in header");
  Matrix x(static_cast<Index>(n1), static_cast<Index>(n2));
  in.read(reinterpret_cast<char*>(x.data()),
          static_cast<std::streamsize>(sizeof(double)) * x.size());
  if (!in) throw std::invalid_argument(path.string() + ": truncated payload");
  return x;
}

/// Reads either format, deciding by the magic bytes.
inline Matrix read_matrix_auto(const fs::path& path) {
  {
    std::ifstream in = open_in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, sizeof(magic));
    if (in && std::memcmp(magic, "SRFM", 4) == 0) return read_matrix_binary(path);
  }
  return read_matrix_csv(path);
}

// ---- Operators as JSON ----

inline void write_operator_json(const fs::path& path, const AffineOperator& op) {
  nlohmann::json j;
  j["shape"] = {op.rows(), op.cols()};
  if (op.kind() == OperatorKind::EntrySampling) {
    j["kind"] = "entry_sampling";
    auto& omega = j["omega"] = nlohmann::json::array();
    for (const EntryIndex& e : op.omega()) omega.push_back({e.row, e.col});
  } else {
    j["kind"] = "general_dense";
    j["m"] = op.m();
    const std::string data_name = path.stem().string() + "_data.srfm";
    write_matrix_binary(path.parent_path() / data_name, op.a_matrix());
    j["data_file"] = data_name;
  }
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

inline AffineOperator read_operator_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": bad JSON: " + e.what());
  }
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto shape = j.at("shape");
    const Index n1 = shape.at(0).get<Index>();
    const Index n2 = shape.at(1).get<Index>();
    if (kind == "entry_sampling") {
      std::vector<EntryIndex> omega;
      for (const auto& pair : j.at("omega"))
        omega.push_back({pair.at(0).get<Index>(), pair.at(1).get<Index>()});
      return AffineOperator::entry_sampling(n1, n2, std::move(omega));
    }
    if (kind == "general_dense") {
      const fs::path data_file = j.at("data_file").get<std::string>();
      const fs::path resolved =
          data_file.is_absolute() ? data_file : path.parent_path() / data_file;
      Matrix a = read_matrix_auto(resolved);
      if (a.rows() != j.at("m").get<Index>())
        throw std::invalid_argument(resolved.string() + ": row count disagrees with \"m\"");
      return AffineOperator::general_dense(std::move(a), n1, n2);
    }
    throw std::invalid_argument(path.string() + ": unknown operator kind \"" + kind + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": bad operator JSON: " + e.what());
  }
}

// ---- Solve reports ----

inline nlohmann::json report_to_json(const SolveReport& report,
                                     const std::string& solution_file) {
  nlohmann::json j;
  j["converged"] = report.converged;
  if (report.rsnr_db)
    j["rsnr_db"] = *report.rsnr_db;
  else
    j["rsnr_db"] = nullptr;
  auto& trace = j["outer_trace"] = nlohmann::json::array();
  for (const StageRecord& rec : report.outer_trace) {
    trace.push_back({{"delta", rec.delta},
                     {"d", rec.d},
                     {"f_delta", rec.f_delta},
                     {"numeric_rank", rec.numeric_rank},
                     {"wall_ms", rec.wall_ms}});
  }
  j["solution_file"] = solution_file;
  return j;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

inline std::string version_string() { return "srf-toolkit 1.0.0"; }

}  // namespace srf::io
