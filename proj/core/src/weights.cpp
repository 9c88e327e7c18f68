#include "partlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "partlab/errors.hpp"
#include "partlab/limits.hpp"
#include "partlab/logfloat.hpp"

namespace partlab {

std::string family_name(Family f) {
  switch (f) {
    case Family::Assembly: return "assembly";
    case Family::Multiset: return "multiset";
    case Family::Selection: return "selection";
    case Family::Custom: return "custom";
  }
  return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
  if (name == "assembly") return Family::Assembly;
  if (name == "multiset") return Family::Multiset;
  if (name == "selection") return Family::Selection;
  if (name == "custom") return Family::Custom;
  return std::nullopt;
}

ParamGen ParamGen::preset(std::string name, std::vector<Rat> args) {
  ParamGen g;
  g.kind = Preset{std::move(name), std::move(args)};
  return g;
}

ParamGen ParamGen::regularly_varying(Rat c, Rat alpha, Rat y) {
  ParamGen g;
  g.kind = RegularlyVarying{std::move(c), std::move(alpha), std::move(y)};
  return g;
}

ParamGen ParamGen::table(std::vector<Rat> entries, TableTail tail) {
  ParamGen g;
  g.kind = Table{std::move(entries), tail};
  return g;
}

namespace {

long isqrt_long(long v) {
  long r = static_cast<long>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

}  // namespace

Int sum_of_squares_count(long j, int d) {
  if (d < 1 || j < 0) throw DomainError("sum_of_squares_count: need j >= 0, d >= 1");
  static std::mutex mu;
  static std::map<int, std::vector<Int>> cache;  // d -> counts[0..limit]
  std::lock_guard<std::mutex> lock(mu);
  auto& counts = cache[d];
  if (static_cast<long>(counts.size()) <= j) {
    const long limit = std::max<long>(j, 2 * static_cast<long>(counts.size()));
    const long root = isqrt_long(limit);
    const std::uint64_t cost = static_cast<std::uint64_t>(d) * (limit + 1) * (root + 1);
    if (cost > work_limit()) {
      throw ResourceError("sum_of_squares_count: work limit exceeded (raise PARTLAB_WORK_LIMIT)");
    }
    std::vector<Int> cur(limit + 1, 0);
    for (long t = 0; t <= limit; ++t) {
      const long r = isqrt_long(t);
      cur[t] = (t == 0) ? 1 : (r * r == t ? 2 : 0);
    }
    for (int s = 2; s <= d; ++s) {
      std::vector<Int> next(limit + 1, 0);
      for (long t = 0; t <= limit; ++t) {
        Int acc = cur[t];  // l = 0 term
        for (long l = 1; l * l <= t; ++l) acc += 2 * cur[t - l * l];
        next[t] = acc;
      }
      cur.swap(next);
    }
    counts.swap(cur);
  }
  return counts[j];
}

namespace {

// Connected labelled graphs on n vertices; drives the "graphs" preset so
// that the full product reproduces 2^binom(n,2)/n! coefficientwise.
const Int& connected_graph_count(int n) {
  static std::mutex mu;
  static std::vector<Int> cache{0, 1};  // C_1 = 1
  std::lock_guard<std::mutex> lock(mu);
  using boost::multiprecision::pow;
  while (static_cast<int>(cache.size()) <= n) {
    const int m = static_cast<int>(cache.size());
    Int total = pow(Int(2), static_cast<unsigned>(m * (m - 1) / 2));
    for (int k = 1; k < m; ++k) {
      total -= binomial(Int(m - 1), static_cast<unsigned>(k - 1)) * cache[k] *
               pow(Int(2), static_cast<unsigned>((m - k) * (m - k - 1) / 2));
    }
    cache.push_back(std::move(total));
  }
  return cache[n];
}

// Log-space copy of the recurrence for float-mode pipelines, where the exact
// integers would be astronomically large.
double connected_graph_count_log(int n) {
  static std::mutex mu;
  static std::vector<LogFloat> cache{LogFloat(), LogFloat::from_double(1.0)};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= n) {
    const int m = static_cast<int>(cache.size());
    LogFloat total = LogFloat::from_log(m * (m - 1) / 2 * M_LN2);
    LogFloat sum;
    for (int k = 1; k < m; ++k) {
      const double lb = std::lgamma(m) - std::lgamma(k) - std::lgamma(m - k + 1);
      sum += LogFloat::from_log(lb + cache[k].log_abs() +
                                (m - k) * (m - k - 1) / 2 * M_LN2);
    }
    cache.push_back(total - sum);
  }
  return cache[n].log_abs();
}

struct PresetInfo {
  Family family;
  unsigned args;
};

const std::map<std::string, PresetInfo>& preset_table() {
  static const std::map<std::string, PresetInfo> table = {
      {"permutations", {Family::Assembly, 0}},
      {"ewens", {Family::Assembly, 1}},
      {"set_partitions", {Family::Assembly, 0}},
      {"graphs", {Family::Assembly, 0}},
      {"forests_labelled", {Family::Assembly, 0}},
      {"oscillating_demo", {Family::Assembly, 0}},
      {"integer_partitions", {Family::Multiset, 0}},
      {"plane_partitions", {Family::Multiset, 0}},
      {"bose", {Family::Multiset, 1}},
      {"mapping_patterns", {Family::Multiset, 1}},
      {"ideal_gas", {Family::Multiset, 1}},
      {"distinct_parts", {Family::Selection, 0}},
      {"fermi", {Family::Selection, 1}},
  };
  return table;
}

long alpha_as_long(const Rat& alpha, const char* who) {
  if (denominator(alpha) != 1) {
    throw DomainError(std::string(who) + ": exponent must be an integer");
  }
  return numerator(alpha).convert_to<long>();
}

Int pow_long(long base, long exp) {
  using boost::multiprecision::pow;
  return pow(Int(base), static_cast<unsigned>(exp));
}

Rat preset_param(const ParamGen::Preset& pr, int j) {
  const Rat jr(j);
  if (pr.name == "permutations") return Rat(1) / jr;
  if (pr.name == "ewens") return pr.args[0] / jr;
  if (pr.name == "set_partitions") return Rat(1, factorial(j));
  if (pr.name == "graphs") return Rat(connected_graph_count(j), factorial(j));
  if (pr.name == "forests_labelled") return Rat(pow_long(j, j - 1), factorial(j));
  if (pr.name == "oscillating_demo") {
    using boost::multiprecision::pow;
    if (j % 2 == 1) return Rat(1) / jr;
    return Rat(Int(1) + pow(Int(2), static_cast<unsigned>(j + 1)), Int(j));
  }
  if (pr.name == "integer_partitions" || pr.name == "distinct_parts") return 1;
  if (pr.name == "plane_partitions") return jr;
  if (pr.name == "bose" || pr.name == "fermi") {
    const long a = alpha_as_long(pr.args[0], pr.name.c_str());
    if (a < 0) throw DomainError(pr.name + ": exponent must be >= 0");
    return Rat(pow_long(j, a));
  }
  if (pr.name == "mapping_patterns") {
    const Rat& b = pr.args[0];
    const Rat value = pow_rat(b, -j) / (2 * jr);
    Int m = round_nearest(value);
    if (m < 1) m = 1;
    return Rat(m);
  }
  if (pr.name == "ideal_gas") {
    const long d = alpha_as_long(pr.args[0], "ideal_gas");
    return Rat(sum_of_squares_count(j, static_cast<int>(d)));
  }
  throw DomainError("unknown preset: " + pr.name);
}

// Cheap ln of the preset parameter; avoids materializing huge integers.
double preset_param_log(const ParamGen::Preset& pr, int j) {
  if (pr.name == "graphs") {
    return connected_graph_count_log(j) - std::lgamma(j + 1.0);
  }
  if (pr.name == "set_partitions") return -std::lgamma(j + 1.0);
  if (pr.name == "forests_labelled") {
    return (j - 1) * std::log(static_cast<double>(j)) - std::lgamma(j + 1.0);
  }
  if (pr.name == "oscillating_demo") {
    const double lj = std::log(static_cast<double>(j));
    if (j % 2 == 1) return -lj;
    return (j + 1) * M_LN2 + std::log1p(std::pow(2.0, -(j + 1.0))) - lj;
  }
  if (pr.name == "mapping_patterns" && j > 64) {
    const double lb = log_int(numerator(pr.args[0])) - log_int(denominator(pr.args[0]));
    return -j * lb - std::log(2.0 * j);
  }
  const Rat v = preset_param(pr, j);
  if (v == 0) return -std::numeric_limits<double>::infinity();
  return log_int(numerator(v)) - log_int(denominator(v));
}

}  // namespace

WeightSpec WeightSpec::assembly(ParamGen gen) {
  return WeightSpec(Family::Assembly, std::move(gen), std::nullopt);
}

WeightSpec WeightSpec::multiset(ParamGen gen, Rat p) {
  return WeightSpec(Family::Multiset, std::move(gen), std::move(p));
}

WeightSpec WeightSpec::selection(ParamGen gen, Rat p) {
  return WeightSpec(Family::Selection, std::move(gen), std::move(p));
}

WeightSpec WeightSpec::custom(std::map<int, std::vector<Rat>> rows) {
  WeightSpec spec(Family::Custom, ParamGen::table({}, TableTail::Zero), std::nullopt);
  spec.custom_ = std::move(rows);
  spec.validate();
  return spec;
}

WeightSpec WeightSpec::from_preset(const std::string& name, std::vector<Rat> args,
                                   std::optional<Rat> p) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) throw DomainError("unknown preset: " + name);
  if (args.size() != it->second.args) {
    throw DomainError("preset " + name + " expects " + std::to_string(it->second.args) +
                      " argument(s)");
  }
  if (name == "ewens" && args[0] <= 0) throw DomainError("ewens: theta must be > 0");
  if (name == "mapping_patterns" && (args[0] <= 0 || args[0] >= 1)) {
    throw DomainError("mapping_patterns: need 0 < b < 1");
  }
  if (name == "ideal_gas") {
    const long d = alpha_as_long(args[0], "ideal_gas");
    if (d < 1) throw DomainError("ideal_gas: dimension must be >= 1");
  }
  ParamGen gen = ParamGen::preset(name, std::move(args));
  switch (it->second.family) {
    case Family::Assembly:
      if (p) throw DomainError("preset " + name + " takes no parameter p");
      return assembly(std::move(gen));
    case Family::Multiset:
      if (!p) throw DomainError("preset " + name + " requires parameter p");
      return multiset(std::move(gen), *p);
    case Family::Selection:
      if (!p) throw DomainError("preset " + name + " requires parameter p");
      return selection(std::move(gen), *p);
    default:
      throw DomainError("preset " + name + ": unsupported family");
  }
}

WeightSpec::WeightSpec(Family f, ParamGen gen, std::optional<Rat> p)
    : family_(f), gen_(std::move(gen)), p_(std::move(p)) {
  validate();
}

void WeightSpec::validate() const {
  switch (family_) {
    case Family::Assembly:
      if (p_) throw DomainError("assemblies take no parameter p");
      break;
    case Family::Multiset:
      if (!p_) throw DomainError("multisets require parameter p");
      // p = 1 is accepted for formal coefficient work (the probability
      // normalizer degenerates but every scaled quantity stays finite).
      if (*p_ <= 0 || *p_ > 1) throw DomainError("multiset: p must satisfy 0 < p < 1");
      break;
    case Family::Selection:
      if (!p_) throw DomainError("selections require parameter p");
      if (*p_ <= 0) throw DomainError("selection: p must satisfy p > 0");
      break;
    case Family::Custom:
      if (p_) throw DomainError("custom specs take no parameter p");
      for (const auto& [j, row] : custom_) {
        if (j < 1) throw DomainError("custom: component sizes start at 1");
        if (row.empty() || row[0] != 1) {
          throw DomainError("custom: each row must start with a unit 0-entry");
        }
        for (const Rat& v : row) {
          if (v < 0) throw DomainError("custom: scaled weights must be >= 0");
        }
      }
      break;
  }
}

const Rat& WeightSpec::p() const {
  if (!p_) throw DomainError("spec has no parameter p");
  return *p_;
}

bool WeightSpec::exact() const {
  if (const auto* rv = std::get_if<ParamGen::RegularlyVarying>(&gen_.kind)) {
    return denominator(rv->alpha) == 1;
  }
  return true;
}

WeightSpec WeightSpec::tilted_by(const Rat& rho) const {
  if (rho < 0) throw DomainError("tilt: rho must be >= 0");
  WeightSpec copy = *this;
  copy.tilt_ = tilt_ * rho;
  if (family_ == Family::Multiset && copy.tilt_ * *p_ >= 1 && copy.tilt_ != 0) {
    throw DomainError("tilt: rho outside the tilt domain (need rho * p < 1)");
  }
  return copy;
}

Rat WeightSpec::raw_param(int j) const {
  if (j < 1) throw DomainError("parameter index must be >= 1");
  if (const auto* pr = std::get_if<ParamGen::Preset>(&gen_.kind)) {
    return preset_param(*pr, j);
  }
  if (const auto* rv = std::get_if<ParamGen::RegularlyVarying>(&gen_.kind)) {
    if (denominator(rv->alpha) != 1) {
      throw DomainError("regularly varying generator with non-integer exponent is float-only");
    }
    const long a = numerator(rv->alpha).convert_to<long>();
    const Rat base = rv->c * pow_rat(rv->y, j) * pow_rat(Rat(j), a);
    if (family_ == Family::Assembly) return base;
    // Integerize so that E Z_j tracks the requested c * y^j * j^alpha.
    const Rat pj = pow_rat(*p_, j);
    const Rat scale = family_ == Family::Multiset ? (1 - pj) / pj : (1 + pj) / pj;
    Int m = round_nearest(base * scale);
    if (m < 1) m = 1;
    return Rat(m);
  }
  const auto& tb = std::get<ParamGen::Table>(gen_.kind);
  if (static_cast<std::size_t>(j) <= tb.entries.size()) return tb.entries[j - 1];
  switch (tb.tail) {
    case TableTail::Zero: return 0;
    case TableTail::RepeatLast:
      if (tb.entries.empty()) throw DomainError("table generator is empty");
      return tb.entries.back();
    case TableTail::Error:
      throw DomainError("parameter index " + std::to_string(j) +
                        " beyond table (tail rule: error)");
  }
  return 0;
}

Rat WeightSpec::param(int j) const {
  std::lock_guard<std::mutex> lock(memo_->mu);
  auto it = memo_->values.find(j);
  if (it != memo_->values.end()) return it->second;
  Rat v = raw_param(j);
  memo_->values.emplace(j, v);
  return v;
}

double WeightSpec::param_f(int j) const {
  if (exact()) {
    if (const auto* pr = std::get_if<ParamGen::Preset>(&gen_.kind)) {
      return preset_param_log(*pr, j);
    }
    const Rat v = param(j);
    if (v == 0) return -std::numeric_limits<double>::infinity();
    return log_int(numerator(v)) - log_int(denominator(v));
  }
  const auto& rv = std::get<ParamGen::RegularlyVarying>(gen_.kind);
  return std::log(to_double(rv.c)) + j * std::log(to_double(rv.y)) +
         to_double(rv.alpha) * std::log(static_cast<double>(j));
}

Rat WeightSpec::assembly_rate(int j) const {
  if (family_ != Family::Assembly) throw DomainError("assembly_rate: not an assembly");
  const Rat a = param(j);
  if (a < 0) throw DomainError("assembly: a_j must be >= 0");
  return a;
}

Int WeightSpec::multiplicity(int j) const {
  if (family_ != Family::Multiset && family_ != Family::Selection) {
    throw DomainError("multiplicity: family has no m_j");
  }
  const Rat m = param(j);
  if (denominator(m) != 1 || m < 0) {
    throw DomainError("multiset/selection: m_j must be a nonnegative integer (j=" +
                      std::to_string(j) + ")");
  }
  return numerator(m);
}

Rat WeightSpec::scaled_weight(int j, int k) const {
  if (j < 1 || k < 0) throw DomainError("scaled_weight: need j >= 1, k >= 0");
  if (k == 0) return 1;
  if (!exact()) throw DomainError("scaled_weight: float-only generator; use scaled_weight_log");
  Rat w;
  switch (family_) {
    case Family::Assembly:
      w = pow_rat(assembly_rate(j), k) / Rat(factorial(static_cast<unsigned>(k)));
      break;
    case Family::Multiset: {
      const Int m = multiplicity(j);
      if (m == 0) return 0;
      w = Rat(binomial(m + k - 1, static_cast<unsigned>(k))) *
          pow_rat(*p_, static_cast<long>(j) * k);
      break;
    }
    case Family::Selection: {
      const Int m = multiplicity(j);
      if (m < k) return 0;  // zero mass, not an error
      w = Rat(binomial(m, static_cast<unsigned>(k))) * pow_rat(*p_, static_cast<long>(j) * k);
      break;
    }
    case Family::Custom: {
      const auto it = custom_.find(j);
      if (it == custom_.end() || static_cast<std::size_t>(k) >= it->second.size()) return 0;
      w = it->second[k];
      break;
    }
  }
  if (tilt_ != 1 && w != 0) w *= pow_rat(tilt_, static_cast<long>(j) * k);
  return w;
}

double WeightSpec::scaled_weight_log(int j, int k) const {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (j < 1 || k < 0) throw DomainError("scaled_weight_log: need j >= 1, k >= 0");
  if (k == 0) return 0.0;
  double lw;
  switch (family_) {
    case Family::Assembly: {
      const double la = param_f(j);
      if (la == kNegInf) return kNegInf;
      lw = k * la - std::lgamma(k + 1.0);
      break;
    }
    case Family::Multiset: {
      const Int m = multiplicity(j);
      if (m == 0) return kNegInf;
      double lb = 0;
      for (int i = 1; i <= k; ++i) lb += log_int(m + i - 1) - std::log(static_cast<double>(i));
      lw = lb + static_cast<double>(j) * k *
                    (log_int(numerator(*p_)) - log_int(denominator(*p_)));
      break;
    }
    case Family::Selection: {
      const Int m = multiplicity(j);
      if (m < k) return kNegInf;
      double lb = 0;
      for (int i = 1; i <= k; ++i) lb += log_int(m - k + i) - std::log(static_cast<double>(i));
      lw = lb + static_cast<double>(j) * k *
                    (log_int(numerator(*p_)) - log_int(denominator(*p_)));
      break;
    }
    case Family::Custom: {
      const Rat w = scaled_weight(j, k);
      if (w == 0) return kNegInf;
      return log_int(numerator(w)) - log_int(denominator(w));
    }
  }
  if (tilt_ == 0) return kNegInf;
  if (tilt_ != 1) {
    lw += static_cast<double>(j) * k *
          (log_int(numerator(tilt_)) - log_int(denominator(tilt_)));
  }
  return lw;
}

double WeightSpec::unscaled_weight(int j, int k) const {
  if (tilt_ != 1) {
    throw DomainError("unscaled_weight: apply to the base spec, not a tilted one");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  switch (family_) {
    case Family::Assembly: {
      const double la = param_f(j);
      const double a = std::exp(la);
      const double lw = (k == 0 ? 0.0 : k * la - std::lgamma(k + 1.0)) - a;
      return std::exp(lw);
    }
    case Family::Multiset: {
      if (*p_ == 1) throw DomainError("unscaled_weight: multiset with p = 1 is formal only");
      const Int m = multiplicity(j);
      if (m == 0) return k == 0 ? 1.0 : 0.0;
      const double lp = log_int(numerator(*p_)) - log_int(denominator(*p_));
      const double pj = std::exp(j * lp);
      double lb = 0;
      for (int i = 1; i <= k; ++i) lb += log_int(m + i - 1) - std::log(static_cast<double>(i));
      const double lw = to_double(Rat(m)) * std::log1p(-pj) + lb + j * static_cast<double>(k) * lp;
      return std::exp(lw);
    }
    case Family::Selection: {
      const Int m = multiplicity(j);
      if (m < k) return 0.0;
      const double lp = log_int(numerator(*p_)) - log_int(denominator(*p_));
      const double pj = std::exp(j * lp);
      double lb = 0;
      for (int i = 1; i <= k; ++i) lb += log_int(m - k + i) - std::log(static_cast<double>(i));
      const double lw = lb + j * static_cast<double>(k) * lp - to_double(Rat(m)) * std::log1p(pj);
      return std::exp(lw);
    }
    case Family::Custom: {
      const auto it = custom_.find(j);
      if (it == custom_.end()) return k == 0 ? 1.0 : 0.0;
      Rat total = 0;
      for (const Rat& v : it->second) total += v;
      const Rat w = static_cast<std::size_t>(k) < it->second.size() ? it->second[k] : Rat(0);
      return to_double(w / total);
    }
  }
  return std::exp(kNegInf);
}

Rat WeightSpec::mean_z(int j) const {
  switch (family_) {
    case Family::Assembly:
      return assembly_rate(j);
    case Family::Multiset: {
      if (*p_ == 1) throw DomainError("mean_z: multiset with p = 1 is formal only");
      const Rat pj = pow_rat(*p_, j);
      return Rat(multiplicity(j)) * pj / (1 - pj);
    }
    case Family::Selection: {
      const Rat pj = pow_rat(*p_, j);
      return Rat(multiplicity(j)) * pj / (1 + pj);
    }
    case Family::Custom: {
      const auto it = custom_.find(j);
      if (it == custom_.end()) return 0;
      Rat total = 0, mean = 0;
      for (std::size_t k = 0; k < it->second.size(); ++k) {
        total += it->second[k];
        mean += Rat(static_cast<long>(k)) * it->second[k];
      }
      return mean / total;
    }
  }
  return 0;
}

double WeightSpec::mean_z_f(int j) const {
  if (exact()) return to_double(mean_z(j));
  // float-only regularly varying assembly
  return std::exp(param_f(j));
}

std::optional<long> WeightSpec::support_bound(int j) const {
  if (family_ == Family::Selection) return multiplicity(j).convert_to<long>();
  if (family_ == Family::Custom) {
    const auto it = custom_.find(j);
    return it == custom_.end() ? 0 : static_cast<long>(it->second.size()) - 1;
  }
  return std::nullopt;
}

std::string WeightSpec::describe() const {
  std::ostringstream os;
  os << family_name(family_);
  if (const auto* pr = std::get_if<ParamGen::Preset>(&gen_.kind)) {
    os << ":" << pr->name;
    for (const Rat& a : pr->args) os << ":" << to_string(a);
  } else if (const auto* rv = std::get_if<ParamGen::RegularlyVarying>(&gen_.kind)) {
    os << ":rv(" << to_string(rv->c) << "," << to_string(rv->alpha) << "," << to_string(rv->y)
       << ")";
  } else {
    os << ":table";
  }
  if (p_) os << ":p=" << to_string(*p_);
  if (tilt_ != 1) os << ":tilt=" << to_string(tilt_);
  return os.str();
}

}  // namespace partlab
