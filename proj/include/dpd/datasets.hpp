#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dpd {

struct NamedDataset {
  std::string name;
  std::vector<double> values;
  std::string source;
};

/// telephone, telephone_cleaned, darwin, darwin_cleaned.
NamedDataset load_builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// One observation per row of the selected column (header name or 0-based
/// index; the first column by default). A non-numeric first row is taken as
/// a header.
NamedDataset load_csv(const std::string& path, const std::optional<std::string>& column = {});

/// Single-column CSV with a header row, 17 significant digits.
void write_csv(const std::string& path, const NamedDataset& data);

/// "builtin:<name>" or a CSV path.
NamedDataset load_data(const std::string& spec, const std::optional<std::string>& column = {});

}  // namespace dpd
