#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace geoanneal {

// Minimal CSV emitter. Doubles use the shortest round-trip representation so
// the files are reproducible byte for byte.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    (write_cell(values, first), ...);
    out_ << '\n';
  }

 private:
  void write_cell(double v, bool& first);
  void write_cell(std::size_t v, bool& first);
  void write_cell(int v, bool& first);
  void write_cell(std::string_view v, bool& first);
  void write_cell(const std::string& v, bool& first) { write_cell(std::string_view(v), first); }
  void write_cell(const char* v, bool& first) { write_cell(std::string_view(v), first); }

  std::ostream& out_;
};

std::string format_double(double v);

}  // namespace geoanneal
