#include "output.hpp"

#include "bhd/error.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#ifndef BHD_VERSION
#define BHD_VERSION "unknown"
#endif

namespace bhd::cli {

namespace fs = std::filesystem;

const char* code_version() { return BHD_VERSION; }

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string hex(const unsigned char* data, unsigned int len) {
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(data[i]);
  return out.str();
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  return hex(digest, len);
}

FileRecord write_table(const fs::path& dir, const std::string& name, const Table& table,
                       const std::string& config_sha256) {
  fs::create_directories(dir);
  const fs::path path = dir / name;
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "# format: " << kTableFormat << '\n';
    out << "# kind: " << table.kind << '\n';
    out << "# config_sha256: " << config_sha256 << '\n';
    out << "# code_version: " << code_version() << '\n';
    for (const auto& [k, v] : table.meta) out << "# " << k << ": " << v << '\n';
    out << "# units:";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? '\t' : ' ') << table.columns[i].unit;
    out << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "\t" : "") << table.columns[i].name;
    out << '\n';
    for (const auto& row : table.rows) {
      if (row.size() != table.columns.size()) throw Error("table " + name + ": row width mismatch");
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << cell_text(row[i]);
      out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
  }
  return {name, sha256_file(path), fs::file_size(path), table.rows.size()};
}

bool Manifest::ok() const {
  for (const auto& t : tasks) {
    if (t.status != "ok") return false;
  }
  return true;
}

void write_manifest(const fs::path& dir, const Manifest& m) {
  using nlohmann::json;
  json tasks = json::array();
  for (const auto& t : m.tasks) {
    json files = json::array();
    for (const auto& f : t.files) {
      files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}, {"rows", f.rows}});
    }
    json e = {{"name", t.name}, {"status", t.status}, {"seconds", t.seconds}, {"files", files},
              {"diagnostics", t.diagnostics}};
    if (!t.error.empty()) e["error"] = t.error;
    tasks.push_back(std::move(e));
  }
  const json doc = {{"format", "bhd-manifest/1"},
                    {"code_version", code_version()},
                    {"command", m.command},
                    {"config", m.config},
                    {"config_sha256", m.config_sha256},
                    {"status", m.ok() ? "ok" : "failed"},
                    {"seconds", m.seconds},
                    {"tasks", tasks}};
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error("cannot write manifest in " + dir.string());
  out << doc.dump(2) << '\n';
}

}  // namespace bhd::cli
