#include "partlab/specfile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "partlab/errors.hpp"

namespace partlab {

std::string ParseError::to_string() const {
  std::ostringstream os;
  os << "line " << line << ":" << col << ": " << message;
  return os.str();
}

namespace {

struct Cursor {
  int line = 0;
  int col = 0;
};

struct RatValue {
  Rat value;
  bool decimal = false;
  Cursor at;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

class Parser {
 public:
  Parser(const std::string& text, bool lenient) : lenient_(lenient) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines_.push_back(line);
  }

  ParseResult run() {
    std::string section;
    bool saw_structure = false;
    for (int ln = 0; ln < static_cast<int>(lines_.size()); ++ln) {
      line_no_ = ln + 1;
      std::string raw = lines_[ln];
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      const std::string body = trim(raw);
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') {
          error({line_no_, 1}, "unterminated section header");
          continue;
        }
        section = body.substr(1, body.size() - 2);
        if (section != "structure" && section != "compute" && section != "cfp") {
          report_unknown({line_no_, 1}, "unknown section [" + section + "]");
          section = "?";
        }
        if (section == "structure") saw_structure = true;
        if (section == "cfp" && !doc_.cfp) doc_.cfp.emplace();
        continue;
      }
      const auto eq = raw.find('=');
      if (eq == std::string::npos) {
        error({line_no_, 1}, "expected key = value");
        continue;
      }
      const std::string key = trim(raw.substr(0, eq));
      std::size_t vcol = eq + 1;
      while (vcol < raw.size() && (raw[vcol] == ' ' || raw[vcol] == '\t')) ++vcol;
      const std::string value = trim(raw.substr(eq + 1));
      const Cursor at{line_no_, static_cast<int>(vcol) + 1};
      if (value.empty()) {
        error(at, "empty value for key '" + key + "'");
        continue;
      }
      handle(section, key, value, at);
    }
    if (!saw_structure) {
      error({1, 1}, "missing required [structure] section");
    }
    finish();
    ParseResult result;
    result.errors = std::move(errors_);
    result.warnings = std::move(warnings_);
    if (result.errors.empty()) result.doc = std::move(doc_);
    return result;
  }

 private:
  void error(Cursor at, const std::string& msg) {
    errors_.push_back(ParseError{at.line, at.col, msg});
  }

  void report_unknown(Cursor at, const std::string& msg) {
    if (lenient_) {
      warnings_.push_back(ParseError{at.line, at.col, msg});
    } else {
      errors_.push_back(ParseError{at.line, at.col, msg});
    }
  }

  std::optional<RatValue> rat_value(const std::string& text, Cursor at) {
    if (auto r = parse_rational(text)) return RatValue{*r, false, at};
    if (auto r = parse_decimal(text)) return RatValue{*r, true, at};
    error(at, "expected a rational number ('3', '1/2' or decimal), got '" + text + "'");
    return std::nullopt;
  }

  void note_decimal(const RatValue& v) {
    if (v.decimal) decimals_.push_back(v.at);
  }

  void handle(const std::string& section, const std::string& key, const std::string& value,
              Cursor at) {
    if (section == "structure") {
      handle_structure(key, value, at);
    } else if (section == "compute") {
      handle_compute(key, value, at);
    } else if (section == "cfp") {
      handle_cfp(key, value, at);
    } else if (section.empty()) {
      error(at, "key '" + key + "' appears before any [section]");
    }
    // section == "?": unknown section already reported; skip its keys.
  }

  void handle_structure(const std::string& key, const std::string& value, Cursor at) {
    if (key == "family") {
      const auto fam = family_from_name(value);
      if (!fam) {
        error(at, "unknown family '" + value + "'");
        return;
      }
      doc_.structure.family = *fam;
      family_set_ = true;
      family_at_ = at;
    } else if (key == "generator") {
      if (parse_generator(value, at)) generator_set_ = true;
      generator_at_ = at;
    } else if (key == "p") {
      const auto v = rat_value(value, at);
      if (!v) return;
      note_decimal(*v);
      doc_.structure.p = v->value;
      p_at_ = at;
    } else if (key == "component") {
      parse_component(value, at);
    } else {
      report_unknown(at, "unknown key '" + key + "' in [structure]");
    }
  }

  void handle_compute(const std::string& key, const std::string& value, Cursor at) {
    if (key == "N") {
      const auto v = rat_value(value, at);
      if (!v) return;
      if (v->decimal || denominator(v->value) != 1 || v->value < 0) {
        error(at, "N must be a nonnegative integer");
        return;
      }
      doc_.compute.order = static_cast<int>(numerator(v->value).convert_to<long>());
      doc_.compute.order_explicit = true;
    } else if (key == "mode") {
      if (value == "exact") {
        doc_.compute.float_mode = false;
      } else if (value == "float") {
        doc_.compute.float_mode = true;
      } else {
        error(at, "mode must be 'exact' or 'float'");
        return;
      }
      doc_.compute.mode_explicit = true;
    } else if (key == "window") {
      const auto v = rat_value(value, at);
      if (!v) return;
      if (v->decimal || denominator(v->value) != 1 || v->value < 2) {
        error(at, "window must be an integer >= 2");
        return;
      }
      doc_.compute.window = static_cast<int>(numerator(v->value).convert_to<long>());
    } else if (key == "tol") {
      const auto v = rat_value(value, at);
      if (!v) return;
      note_decimal(*v);
      if (v->value <= 0) {
        error(at, "tol must be > 0");
        return;
      }
      doc_.compute.tol = v->value;
    } else {
      report_unknown(at, "unknown key '" + key + "' in [compute]");
    }
  }

  void handle_cfp(const std::string& key, const std::string& value, Cursor at) {
    if (!doc_.cfp) doc_.cfp.emplace();
    if (key == "n") {
      const auto v = rat_value(value, at);
      if (!v) return;
      if (v->decimal || denominator(v->value) != 1 || v->value < 1) {
        error(at, "cfp n must be an integer >= 1");
        return;
      }
      doc_.cfp->n = static_cast<int>(numerator(v->value).convert_to<long>());
    } else if (key == "gauge") {
      if (value == "ratio") {
        doc_.cfp->mean_field = false;
      } else if (value == "mean_field") {
        doc_.cfp->mean_field = true;
      } else {
        error(at, "gauge must be 'ratio' or 'mean_field'");
      }
    } else if (key == "t_max") {
      // t_max feeds the floating simulation clock; decimals are fine here.
      const auto v = rat_value(value, at);
      if (!v) return;
      const double t = to_double(v->value);
      if (!(t >= 0)) {
        error(at, "t_max must be >= 0");
        return;
      }
      doc_.cfp->t_max = t;
    } else if (key == "seed") {
      const auto v = rat_value(value, at);
      if (!v || v->decimal || denominator(v->value) != 1 || v->value < 0) {
        error(at, "seed must be a nonnegative integer");
        return;
      }
      doc_.cfp->seed = numerator(v->value).convert_to<std::uint64_t>();
    } else {
      report_unknown(at, "unknown key '" + key + "' in [cfp]");
    }
  }

  bool parse_generator(const std::string& value, Cursor at) {
    const auto open = value.find('(');
    if (open == std::string::npos) {
      doc_.structure.generator = ParamGen::preset(value);
      return true;
    }
    if (value.back() != ')') {
      error(at, "generator arguments must close with ')'");
      return false;
    }
    const std::string name = trim(value.substr(0, open));
    const std::string inner = value.substr(open + 1, value.size() - open - 2);
    if (name == "table") {
      const auto semi = inner.find(';');
      std::string list = semi == std::string::npos ? inner : inner.substr(0, semi);
      TableTail tail = TableTail::Error;
      if (semi != std::string::npos) {
        const std::string rule = trim(inner.substr(semi + 1));
        if (rule == "tail=zero") {
          tail = TableTail::Zero;
        } else if (rule == "tail=repeat") {
          tail = TableTail::RepeatLast;
        } else if (rule == "tail=error") {
          tail = TableTail::Error;
        } else {
          error(at, "table tail rule must be tail=zero|repeat|error");
          return false;
        }
      }
      std::vector<Rat> entries;
      for (const std::string& piece : split(list, ',')) {
        const auto v = rat_value(trim(piece), at);
        if (!v) return false;
        note_decimal(*v);
        entries.push_back(v->value);
      }
      if (entries.empty()) {
        error(at, "table generator needs at least one entry");
        return false;
      }
      doc_.structure.generator = ParamGen::table(std::move(entries), tail);
      return true;
    }
    std::vector<Rat> args;
    for (const std::string& piece : split(inner, ',')) {
      const auto v = rat_value(trim(piece), at);
      if (!v) return false;
      note_decimal(*v);
      args.push_back(v->value);
    }
    if (name == "rv") {
      if (args.size() != 3) {
        error(at, "rv takes exactly (c, alpha, y)");
        return false;
      }
      if (args[0] <= 0 || args[2] <= 0) {
        error(at, "rv requires c > 0 and y > 0");
        return false;
      }
      doc_.structure.generator = ParamGen::regularly_varying(args[0], args[1], args[2]);
      return true;
    }
    doc_.structure.generator = ParamGen::preset(name, std::move(args));
    return true;
  }

  void parse_component(const std::string& value, Cursor at) {
    const auto colon = value.find(':');
    if (colon == std::string::npos) {
      error(at, "component rows look like 'j: w0, w1, ...'");
      return;
    }
    const auto jv = parse_rational(trim(value.substr(0, colon)));
    if (!jv || denominator(*jv) != 1 || *jv < 1) {
      error(at, "component size must be an integer >= 1");
      return;
    }
    const int j = static_cast<int>(numerator(*jv).convert_to<long>());
    std::vector<Rat> row;
    for (const std::string& piece : split(value.substr(colon + 1), ',')) {
      const auto v = rat_value(trim(piece), at);
      if (!v) return;
      note_decimal(*v);
      row.push_back(v->value);
    }
    if (row.empty() || row[0] != 1) {
      error(at, "component rows must start with weight 1 at k=0");
      return;
    }
    if (doc_.structure.components.count(j)) {
      error(at, "duplicate component row for size " + std::to_string(j));
      return;
    }
    doc_.structure.components.emplace(j, std::move(row));
  }

  void finish() {
    if (!errors_.empty()) return;
    if (!family_set_) {
      error({line_no_, 1}, "missing required key 'family'");
      return;
    }
    const Family fam = doc_.structure.family;
    if (fam == Family::Custom) {
      if (doc_.structure.components.empty()) {
        error(family_at_, "custom family needs at least one component row");
        return;
      }
    } else if (!generator_set_) {
      error(family_at_, "missing required key 'generator'");
      return;
    }
    if (!doc_.compute.float_mode) {
      for (const Cursor& at : decimals_) {
        error(at, "decimal literals are float-mode only; use num/den in exact mode");
      }
      if (!errors_.empty()) return;
    }
    // Family/p domain checks with positioned messages.
    if (fam == Family::Multiset) {
      if (!doc_.structure.p) {
        error(family_at_, "multiset requires p");
      } else if (*doc_.structure.p <= 0 || *doc_.structure.p > 1) {
        error(p_at_, "p must satisfy 0<p<1 (p=1 is accepted for formal coefficients)");
      }
    } else if (fam == Family::Selection) {
      if (!doc_.structure.p) {
        error(family_at_, "selection requires p");
      } else if (*doc_.structure.p <= 0) {
        error(p_at_, "p must satisfy p>0");
      }
    } else if (doc_.structure.p) {
      error(p_at_, "family takes no parameter p");
    }
    if (!errors_.empty()) return;
    // Deep validation (preset names, argument counts, generator domains).
    try {
      (void)doc_.to_weight_spec();
    } catch (const Error& e) {
      error(generator_set_ ? generator_at_ : family_at_, e.what());
    }
  }

  bool lenient_;
  std::vector<std::string> lines_;
  int line_no_ = 1;
  SpecDocument doc_;
  std::vector<ParseError> errors_;
  std::vector<ParseError> warnings_;
  std::vector<Cursor> decimals_;
  bool family_set_ = false;
  bool generator_set_ = false;
  Cursor family_at_{1, 1};
  Cursor generator_at_{1, 1};
  Cursor p_at_{1, 1};
};

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

WeightSpec SpecDocument::to_weight_spec() const {
  switch (structure.family) {
    case Family::Assembly: {
      if (const auto* pr = std::get_if<ParamGen::Preset>(&structure.generator.kind)) {
        return WeightSpec::from_preset(pr->name, pr->args, std::nullopt);
      }
      return WeightSpec::assembly(structure.generator);
    }
    case Family::Multiset: {
      if (const auto* pr = std::get_if<ParamGen::Preset>(&structure.generator.kind)) {
        return WeightSpec::from_preset(pr->name, pr->args, structure.p);
      }
      return WeightSpec::multiset(structure.generator, *structure.p);
    }
    case Family::Selection: {
      if (const auto* pr = std::get_if<ParamGen::Preset>(&structure.generator.kind)) {
        return WeightSpec::from_preset(pr->name, pr->args, structure.p);
      }
      return WeightSpec::selection(structure.generator, *structure.p);
    }
    case Family::Custom:
      return WeightSpec::custom(structure.components);
  }
  throw DomainError("unreachable family");
}

std::string serialize_spec(const SpecDocument& doc) {
  std::ostringstream os;
  os << "[structure]\n";
  os << "family = " << family_name(doc.structure.family) << "\n";
  if (doc.structure.family != Family::Custom) {
    os << "generator = ";
    if (const auto* pr = std::get_if<ParamGen::Preset>(&doc.structure.generator.kind)) {
      os << pr->name;
      if (!pr->args.empty()) {
        os << "(";
        for (std::size_t i = 0; i < pr->args.size(); ++i) {
          if (i) os << ", ";
          os << to_string(pr->args[i]);
        }
        os << ")";
      }
    } else if (const auto* rv =
                   std::get_if<ParamGen::RegularlyVarying>(&doc.structure.generator.kind)) {
      os << "rv(" << to_string(rv->c) << ", " << to_string(rv->alpha) << ", "
         << to_string(rv->y) << ")";
    } else {
      const auto& tb = std::get<ParamGen::Table>(doc.structure.generator.kind);
      os << "table(";
      for (std::size_t i = 0; i < tb.entries.size(); ++i) {
        if (i) os << ", ";
        os << to_string(tb.entries[i]);
      }
      os << "; tail=";
      switch (tb.tail) {
        case TableTail::Zero: os << "zero"; break;
        case TableTail::RepeatLast: os << "repeat"; break;
        case TableTail::Error: os << "error"; break;
      }
      os << ")";
    }
    os << "\n";
  }
  if (doc.structure.p) os << "p = " << to_string(*doc.structure.p) << "\n";
  for (const auto& [j, row] : doc.structure.components) {
    os << "component = " << j << ": ";
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) os << ", ";
      os << to_string(row[k]);
    }
    os << "\n";
  }
  os << "\n[compute]\n";
  os << "N = " << doc.compute.order << "\n";
  os << "mode = " << (doc.compute.float_mode ? "float" : "exact") << "\n";
  os << "window = " << doc.compute.window << "\n";
  os << "tol = " << to_string(doc.compute.tol) << "\n";
  if (doc.cfp) {
    os << "\n[cfp]\n";
    os << "n = " << doc.cfp->n << "\n";
    os << "gauge = " << (doc.cfp->mean_field ? "mean_field" : "ratio") << "\n";
    os << "t_max = " << format_double(doc.cfp->t_max) << "\n";
    os << "seed = " << doc.cfp->seed << "\n";
  }
  return os.str();
}

ParseResult parse_spec(const std::string& text, bool lenient) {
  return Parser(text, lenient).run();
}

}  // namespace partlab
