#pragma once

#include <string>
#include <vector>

#include "partlab/rational.hpp"

namespace partlab {

/// RFC-4180-style CSV writer.  Exact rationals travel as "num/den" strings,
/// doubles as shortest round-trip decimals, so reruns are byte-identical.
class CsvWriter {
 public:
  void header(const std::vector<std::string>& names);

  CsvWriter& field(const std::string& v);
  CsvWriter& field(long v);
  CsvWriter& field(int v) { return field(static_cast<long>(v)); }
  CsvWriter& field(double v);
  CsvWriter& field(const Rat& v);
  void end_row();

  const std::string& text() const { return out_; }
  void write_file(const std::string& path) const;

 private:
  void raw(const std::string& v);

  std::string out_;
  bool row_open_ = false;
};

std::string format_double(double v);

}  // namespace partlab
