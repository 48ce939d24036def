#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace epiident::csv {

// Shortest decimal string that parses back to exactly x ("nan" for missing
// values). This is what makes identical configs produce byte-identical files.
std::string format_double(double x);
double parse_double(std::string_view text);

// Comment block, header, data rows. Serialization is canonical, so
// parse(to_string(t)) == t and to_string(parse(s)) == s for files we wrote.
struct Table {
  std::vector<std::string> comments;  // emitted first, each prefixed "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const Table&) const = default;
};

std::string to_string(const Table& t);
Table parse(std::string_view text);

void write_file(const std::string& path, const Table& t);
Table read_file(const std::string& path);

}  // namespace epiident::csv
