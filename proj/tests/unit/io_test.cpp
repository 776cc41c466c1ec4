#include "rabisim/io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace rabisim {
namespace {

TEST(Csv, NumbersRoundTripWith17Digits) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Csv, LayoutHeaderMetadataRows) {
  CsvTable t;
  t.header = {"x", "label", "count"};
  t.metadata = {{"omega", "1"}};
  t.add_row({0.5, std::string("a,b"), std::int64_t{3}});
  t.add_row({std::monostate{}, std::string("plain"), std::int64_t{-1}});
  std::ostringstream out;
  write_csv(out, t);
  EXPECT_EQ(out.str(), "x,label,count\n# omega: 1\n0.5,\"a,b\",3\n,plain,-1\n");
}

TEST(Csv, RowWidthChecked) {
  CsvTable t;
  t.header = {"a", "b"};
  EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, ListsFilesWithChecksums) {
  const auto dir = std::filesystem::temp_directory_path() / "rabisim_io_test";
  std::filesystem::remove_all(dir);
  CsvTable t;
  t.header = {"v"};
  t.add_row({1.0});
  write_csv_file(dir / "sub" / "data.csv", t);
  Manifest m{"sweep", "demo", {{"seed", "7"}}, {{dir / "sub" / "data.csv", "demo table", {{"g", 0.1}}, {}}}};
  write_manifest(dir / "manifest.json", m);

  std::ifstream in(dir / "manifest.json");
  const auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j.at("files").size(), 1u);
  const auto& f = j.at("files").at(0);
  EXPECT_EQ(f.at("path"), "sub/data.csv");
  EXPECT_EQ(f.at("sha256"), sha256_file(dir / "sub" / "data.csv"));
  EXPECT_EQ(f.at("bytes"), std::filesystem::file_size(dir / "sub" / "data.csv"));
  EXPECT_TRUE(j.contains("timestamp"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace rabisim
