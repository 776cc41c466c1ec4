#include "rabisim/io.hpp"

#include "rabisim/version.hpp"

#include <json.hpp>

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace rabisim {

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header.size()) throw std::invalid_argument("CsvTable::add_row: row width differs from header");
  rows.push_back(std::move(row));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

struct CellWriter {
  std::ostream& out;
  void operator()(std::monostate) const {}
  void operator()(double x) const { out << format_number(x); }
  void operator()(std::int64_t x) const { out << x; }
  void operator()(const std::string& s) const { out << escape(s); }
};

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << escape(table.header[i]);
  out << '\n';
  for (const auto& [key, value] : table.metadata) out << "# " << key << ": " << value << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(CellWriter{out}, row[i]);
    }
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  std::ostringstream s;
  write_csv(s, table);
  write_text_file(path, s.str());
}

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha256: digest computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return sha256_hex(s.str());
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  using nlohmann::ordered_json;
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  ordered_json j;
  j["kind"] = manifest.kind;
  j["name"] = manifest.name;
  j["version"] = kVersion;
  j["timestamp"] = utc_timestamp();
  ordered_json settings = ordered_json::object();
  for (const auto& [k, v] : manifest.settings) settings[k] = v;
  j["settings"] = settings;
  ordered_json files = ordered_json::array();
  for (const auto& f : manifest.files) {
    ordered_json e;
    const auto full = f.path.is_absolute() ? f.path : base / f.path;
    e["path"] = std::filesystem::relative(full, base).generic_string();
    e["description"] = f.description;
    e["bytes"] = std::filesystem::file_size(full);
    e["sha256"] = sha256_file(full);
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : f.parameters) params[k] = v;
    e["parameters"] = params;
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : f.metadata) meta[k] = v;
    e["metadata"] = meta;
    files.push_back(e);
  }
  j["files"] = files;
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace rabisim
