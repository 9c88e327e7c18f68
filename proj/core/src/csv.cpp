#include "partlab/csv.hpp"

#include <charconv>
#include <fstream>

#include "partlab/errors.hpp"

namespace partlab {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const std::string& n : names) field(n);
  end_row();
}

void CsvWriter::raw(const std::string& v) {
  if (row_open_) out_ += ',';
  const bool quote = v.find_first_of(",\"\n") != std::string::npos;
  if (quote) {
    out_ += '"';
    for (char c : v) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  } else {
    out_ += v;
  }
  row_open_ = true;
}

CsvWriter& CsvWriter::field(const std::string& v) {
  raw(v);
  return *this;
}

CsvWriter& CsvWriter::field(long v) {
  raw(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::field(double v) {
  raw(format_double(v));
  return *this;
}

CsvWriter& CsvWriter::field(const Rat& v) {
  raw(to_string(v));
  return *this;
}

void CsvWriter::end_row() {
  out_ += '\n';
  row_open_ = false;
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << out_;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace partlab
