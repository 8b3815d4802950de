#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <numeric>
#include <string>

#include "doctest.h"
#include "dpd/datasets.hpp"
#include "dpd/errors.hpp"
#include "dpd/rng.hpp"

using namespace dpd;

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("dpd_test_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

}  // namespace

TEST_CASE("builtin datasets") {
  const auto tel = load_builtin("telephone");
  CHECK(tel.values.size() == 14);
  CHECK(std::accumulate(tel.values.begin(), tel.values.end(), 0.0) == 565.0);
  const auto clean = load_builtin("telephone_cleaned");
  CHECK(clean.values.size() == 13);
  CHECK(*std::min_element(clean.values.begin(), clean.values.end()) == -135);
  const auto darwin = load_builtin("darwin");
  CHECK(darwin.values.size() == 15);
  CHECK(std::count_if(darwin.values.begin(), darwin.values.end(), [](double v) { return v < 0; }) == 2);
  const auto dc = load_builtin("darwin_cleaned");
  CHECK(dc.values.size() == 13);
  CHECK(dc.values.front() == 6);
  CHECK(builtin_names().size() == 4);
  try {
    load_builtin("iris");
    FAIL("expected UnknownDataset");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownDataset);
  }
  CHECK(load_data("builtin:darwin").values == darwin.values);
}

TEST_CASE("CSV loading") {
  CHECK(load_csv(temp_file("plain.csv", "1\n2\n3\n")).values == std::vector<double>{1, 2, 3});
  std::string body = "diff\n";
  for (double v : load_builtin("telephone").values) body += std::to_string(v) + "\n";
  CHECK(load_csv(temp_file("header.csv", body)).values == load_builtin("telephone").values);

  const auto two = temp_file("two.csv", "a,b\n1,10\n2,20\n");
  CHECK(load_csv(two, std::string("b")).values == std::vector<double>{10, 20});
  CHECK(load_csv(two, std::string("1")).values == std::vector<double>{10, 20});

  try {
    load_csv(temp_file("bad.csv", "x\n1\n2\n3\nfoo\n"));
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("row 5") != std::string::npos);
  }
  try {
    load_csv(temp_file("empty_cell.csv", "1,2\n3,\n"), std::string("1"));
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
  try {
    load_csv("/nonexistent/dir/file.csv");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("CSV round trip is bit exact") {
  RngStream rng(1, 0);
  NamedDataset d{"values", {}, ""};
  for (int i = 0; i < 500; ++i) d.values.push_back(rng.next_gaussian() * std::pow(10.0, i % 30 - 15));
  d.values.push_back(0.1);
  d.values.push_back(-1e-300);
  const auto path = (std::filesystem::temp_directory_path() / "dpd_test_roundtrip.csv").string();
  write_csv(path, d);
  CHECK(load_csv(path).values == d.values);
}
