#include "geoanneal/csv.hpp"

#include <charconv>
#include <cmath>

namespace geoanneal {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out) {
  bool first = true;
  for (auto h : header) write_cell(h, first);
  out_ << '\n';
}

void CsvWriter::write_cell(double v, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << format_double(v);
}

void CsvWriter::write_cell(std::size_t v, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << v;
}

void CsvWriter::write_cell(int v, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << v;
}

void CsvWriter::write_cell(std::string_view v, bool& first) {
  if (!first) out_ << ',';
  first = false;
  out_ << v;
}

}  // namespace geoanneal
