#include "epiident/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "epiident/errors.hpp"

namespace epiident::csv {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ParseError("not a number: '" + std::string(text) + "'");
  return value;
}

namespace {

void split_fields(std::string_view line, std::vector<std::string>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void join_fields(const std::vector<std::string>& fields, std::string& out) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
}

}  // namespace

std::string to_string(const Table& t) {
  std::string out;
  for (const auto& c : t.comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
  join_fields(t.header, out);
  for (const auto& row : t.rows) join_fields(row, out);
  return out;
}

Table parse(std::string_view text) {
  Table t;
  bool saw_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() && pos >= text.size()) break;
    if (!saw_header && line.starts_with('#')) {
      std::string_view body = line.substr(1);
      if (body.starts_with(' ')) body.remove_prefix(1);
      t.comments.emplace_back(body);
      continue;
    }
    if (!saw_header) {
      split_fields(line, t.header);
      saw_header = true;
      continue;
    }
    split_fields(line, t.rows.emplace_back());
    if (t.rows.back().size() != t.header.size())
      throw ParseError("row has " + std::to_string(t.rows.back().size()) +
                       " fields, header has " + std::to_string(t.header.size()));
  }
  if (!saw_header) throw ParseError("no header line");
  return t;
}

void write_file(const std::string& path, const Table& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgumentError("cannot open for writing: " + path);
  const std::string text = to_string(t);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InvalidArgumentError("write failed: " + path);
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgumentError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace epiident::csv
