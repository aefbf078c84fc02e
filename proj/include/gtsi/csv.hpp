#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gtsi/errors.hpp"

namespace gtsi {

// Minimal CSV: comma separated, first line is the header, no quoting (none of
// the formats here need it). Numbers are written with enough digits to
// round-trip doubles exactly.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // throws ConfigError if absent
};

CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string fmt_double(double v);  // shortest round-trip representation

double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

}  // namespace gtsi
