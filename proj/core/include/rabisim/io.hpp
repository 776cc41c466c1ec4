// io.hpp: CSV tables and file checksums.
//
// CSV layout: header line, then "# key: value" metadata lines, then data rows.
// Reals are written with 17 significant digits ("%.17g", '.' decimal point);
// non-finite values as nan, inf, -inf; empty cells stand for "not computed".

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace rabisim {

using CsvCell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::vector<CsvCell>> rows;

  // Throws std::invalid_argument when the row width differs from the header.
  void add_row(std::vector<CsvCell> row);
};

std::string format_number(double x);

// Strings containing ',', '"' or a newline are quoted.
void write_csv(std::ostream& out, const CsvTable& table);

// Creates parent directories. Throws std::runtime_error on I/O failure.
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace rabisim

namespace rabisim {

// JSON manifest describing a set of output files. write_manifest adds the
// library version, a UTC timestamp, and per file its size and SHA-256.
struct ManifestFile {
  std::filesystem::path path;  // recorded relative to the manifest directory
  std::string description;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::pair<std::string, std::string>> metadata;
};

struct Manifest {
  std::string kind;  // e.g. "figure", "sweep", "spectrum"
  std::string name;
  std::vector<std::pair<std::string, std::string>> settings;
  std::vector<ManifestFile> files;
};

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace rabisim
