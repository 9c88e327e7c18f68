#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "partlab/weights.hpp"

namespace partlab {

struct ParseError {
  int line = 0;
  int col = 0;
  std::string message;

  std::string to_string() const;
};

/// Parsed structure-spec configuration.
///
/// Format: line-oriented key=value with [section] headers.  Grammar is
/// documented in docs/specfile.md; sections are [structure] (required),
/// [compute] and [cfp] (optional).  Unknown keys are errors in strict mode
/// and warnings in lenient mode.
struct SpecDocument {
  struct Structure {
    Family family = Family::Assembly;
    ParamGen generator = ParamGen::preset("permutations");
    std::optional<Rat> p;
    std::map<int, std::vector<Rat>> components;  // custom family rows
  };
  struct Compute {
    int order = 200;
    bool float_mode = false;
    int window = 25;
    Rat tol = Rat(1, 1000);
    bool order_explicit = false;
    bool mode_explicit = false;
  };
  struct Cfp {
    int n = 8;
    bool mean_field = false;
    double t_max = 100;
    std::uint64_t seed = 1;
  };

  Structure structure;
  Compute compute;
  std::optional<Cfp> cfp;

  WeightSpec to_weight_spec() const;
};

struct ParseResult {
  std::optional<SpecDocument> doc;
  std::vector<ParseError> errors;
  std::vector<ParseError> warnings;  // lenient-mode downgrades

  bool ok() const { return doc.has_value() && errors.empty(); }
};

/// Strict by default; lenient mode downgrades unknown keys to warnings.
ParseResult parse_spec(const std::string& text, bool lenient = false);

/// Canonical text: fixed section and key order, defaults written out.
/// parse(serialize(doc)) reproduces the document.
std::string serialize_spec(const SpecDocument& doc);

}  // namespace partlab
