#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "plap/error.hpp"

namespace plap::csv {

/// 17 significant digits, '.' decimal point regardless of locale settings of
/// the caller (printf "%g" with the default "C" locale).
inline std::string number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    require(out_.good(), ErrorKind::Io, "cannot open " + path + " for writing");
  }

  void comment(std::string_view text) { out_ << "# " << text << '\n'; }

  void header(std::initializer_list<std::string_view> columns) {
    bool first = true;
    for (auto c : columns) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << number(v);
      first = false;
    }
    out_ << '\n';
  }

  void raw_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace plap::csv
