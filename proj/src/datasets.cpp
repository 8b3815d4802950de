#include "dpd/datasets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "dpd/errors.hpp"

namespace dpd {
namespace {

const std::vector<double> kTelephone = {-988, -135, -78, 3,   59,  83,  93,
                                        110,  189,  197, 204, 229, 289, 310};
const std::vector<double> kDarwin = {-67, -48, 6, 8, 14, 16, 23, 24, 28, 29, 41, 49, 56, 60, 75};

const char* kTelephoneSource =
    "Telephone-line fault data: paired differences of fault rates, inverse test rates (Welch 1987)";
const char* kDarwinSource =
    "Darwin's Zea mays data: paired height differences, cross- minus self-fertilized (Fisher 1935)";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"telephone", "telephone_cleaned", "darwin", "darwin_cleaned"};
}

NamedDataset load_builtin(const std::string& name) {
  if (name == "telephone") return {name, kTelephone, kTelephoneSource};
  if (name == "telephone_cleaned") {
    return {name, std::vector<double>(kTelephone.begin() + 1, kTelephone.end()),
            std::string(kTelephoneSource) + "; first observation (-988) removed"};
  }
  if (name == "darwin") return {name, kDarwin, kDarwinSource};
  if (name == "darwin_cleaned") {
    return {name, std::vector<double>(kDarwin.begin() + 2, kDarwin.end()),
            std::string(kDarwinSource) + "; the two negative differences removed"};
  }
  throw Error(ErrorKind::UnknownDataset, "no builtin dataset named '" + name + "'");
}

NamedDataset load_csv(const std::string& path, const std::optional<std::string>& column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");

  NamedDataset out;
  out.name = path;
  out.source = path;
  std::string line;
  int row = 0;
  std::optional<std::size_t> col;
  if (column) {
    if (auto idx = parse_number(*column); idx && *idx >= 0 && *idx == std::floor(*idx)) {
      col = static_cast<std::size_t>(*idx);
    }
  } else {
    col = 0;
  }
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (first) {
      first = false;
      bool header = false;
      if (!col) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i] == *column) col = i;
        }
        if (!col) throw Error(ErrorKind::ParseError, "no column named '" + *column + "'");
        header = true;
      } else {
        header = *col < cells.size() && !parse_number(cells[*col]);
      }
      if (header) continue;
    }
    std::ostringstream where;
    where << path << ": row " << row << ", column " << *col + 1;
    if (*col >= cells.size()) throw Error(ErrorKind::ParseError, where.str() + ": missing cell");
    const auto v = parse_number(cells[*col]);
    if (!v) {
      throw Error(ErrorKind::ParseError,
                  where.str() + ": '" + cells[*col] + "' is not a number");
    }
    out.values.push_back(*v);
  }
  if (out.values.empty()) throw Error(ErrorKind::ParseError, path + ": no observations");
  return out;
}

void write_csv(const std::string& path, const NamedDataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << (data.name.empty() ? "value" : data.name) << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (double v : data.values) out << v << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

NamedDataset load_data(const std::string& spec, const std::optional<std::string>& column) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) return load_builtin(spec.substr(prefix.size()));
  return load_csv(spec, column);
}

}  // namespace dpd
