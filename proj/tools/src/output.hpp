#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bhd::cli {

inline constexpr const char* kTableFormat = "bhd-table/1";

/// A table cell. Non-finite doubles are written as `null`.
using Cell = std::variant<double, std::int64_t, std::string>;

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless, "-" for labels and indices
};

struct Table {
  std::string kind;
  /// Extra `# key: value` header lines, in order.
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct FileRecord {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
  std::size_t rows = 0;
};

/// Shortest text that reads back to the same double; `null` if not finite.
std::string format_double(double x);

/// Writes `table` to dir/name as tab-separated text:
///
///   # format: bhd-table/1
///   # kind: <kind>
///   # config_sha256: <hex>
///   # code_version: <version>
///   # <meta key>: <value>           (zero or more)
///   # units: <unit>\t<unit>...
///   <name>\t<name>...
///   rows...
FileRecord write_table(const std::filesystem::path& dir, const std::string& name, const Table& table,
                       const std::string& config_sha256);

std::string sha256_file(const std::filesystem::path& path);

struct TaskRecord {
  std::string name;
  std::string status = "ok";  // ok | failed
  std::string error;
  double seconds = 0.0;
  std::vector<FileRecord> files;
  nlohmann::json diagnostics = nlohmann::json::object();
};

struct Manifest {
  std::string command;
  nlohmann::json config;
  std::string config_sha256;
  std::vector<TaskRecord> tasks;
  double seconds = 0.0;

  bool ok() const;
};

/// Writes dir/manifest.json.
void write_manifest(const std::filesystem::path& dir, const Manifest& manifest);

const char* code_version();

}  // namespace bhd::cli
