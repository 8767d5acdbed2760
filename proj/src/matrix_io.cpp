#include "mvs/matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mvs::io {
namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

double parse_double(std::string_view token, const std::filesystem::path& path) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error("'" + path.string() + "': bad numeric literal '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (sep == ',') {
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = line.find(',', start);
      std::string_view field = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '"')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '"' || field.back() == '\r')) {
        field.remove_suffix(1);
      }
      out.push_back(field);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

MatrixFormat parse_format(const std::string& name) {
  if (name == "txt" || name == "text") return MatrixFormat::kText;
  if (name == "csv") return MatrixFormat::kCsv;
  throw std::invalid_argument("unknown matrix format '" + name + "' (expected txt or csv)");
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format) {
  std::ofstream out = open_out(path);
  const char sep = format == MatrixFormat::kCsv ? ',' : ' ';
  if (format == MatrixFormat::kText) out << m.rows() << ' ' << m.cols() << '\n';
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += sep;
      line += format_double(m(i, j));
    }
    line += format == MatrixFormat::kCsv ? "\r\n" : "\n";
    out << line;
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw std::runtime_error("'" + path.string() + "': empty matrix file");

  // A single-column CSV has no commas, so the extension wins when present.
  const bool csv = path.extension() == ".csv" || lines.front().find(',') != std::string::npos;
  if (csv) {
    const Index cols = static_cast<Index>(split(lines.front(), ',').size());
    Matrix m(static_cast<Index>(lines.size()), cols);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto fields = split(lines[i], ',');
      if (static_cast<Index>(fields.size()) != cols) {
        throw std::runtime_error("'" + path.string() + "': ragged CSV row " + std::to_string(i + 1));
      }
      for (Index j = 0; j < cols; ++j) m(static_cast<Index>(i), j) = parse_double(fields[j], path);
    }
    return m;
  }

  const auto header = split(lines.front(), ' ');
  if (header.size() != 2) {
    throw std::runtime_error("'" + path.string() + "': expected 'rows cols' header");
  }
  const double rows_d = parse_double(header[0], path);
  const double cols_d = parse_double(header[1], path);
  if (rows_d < 0 || cols_d < 0 || rows_d != std::floor(rows_d) || cols_d != std::floor(cols_d)) {
    throw std::runtime_error("'" + path.string() + "': invalid matrix dimensions in header");
  }
  const auto rows = static_cast<Index>(rows_d);
  const auto cols = static_cast<Index>(cols_d);
  if (static_cast<Index>(lines.size()) - 1 != rows) {
    throw std::runtime_error("'" + path.string() + "': header says " + std::to_string(rows) +
                             " rows, found " + std::to_string(lines.size() - 1));
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto fields = split(lines[static_cast<std::size_t>(i) + 1], ' ');
    if (static_cast<Index>(fields.size()) != cols) {
      throw std::runtime_error("'" + path.string() + "': row " + std::to_string(i + 1) + " has " +
                               std::to_string(fields.size()) + " values, expected " +
                               std::to_string(cols));
    }
    for (Index j = 0; j < cols; ++j) m(i, j) = parse_double(fields[static_cast<std::size_t>(j)], path);
  }
  return m;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : kv) out << key << '=' << value << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return kv;
}

const std::string* find_value(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return &v;
  }
  return nullptr;
}

}  // namespace mvs::io
