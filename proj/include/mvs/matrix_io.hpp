#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mvs/model.hpp"

namespace mvs::io {

enum class MatrixFormat {
  kText,  // "rows cols" header, then one space-separated row per line
  kCsv,   // RFC 4180 rows, no header
};

MatrixFormat parse_format(const std::string& name);

/// Writes with 17 significant digits so values round-trip exactly.
void write_matrix(const std::filesystem::path& path, const Matrix& m,
                  MatrixFormat format = MatrixFormat::kText);

/// Reads either format; CSV is recognized by a .csv extension or
/// commas on the first line.
Matrix read_matrix(const std::filesystem::path& path);

/// Ordered key=value records.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);

/// Value for `key`, or nullptr.
const std::string* find_value(const KeyValues& kv, const std::string& key);

std::string format_double(double x);

}  // namespace mvs::io
