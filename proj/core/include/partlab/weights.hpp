#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "partlab/rational.hpp"

namespace partlab {

enum class Family { Assembly, Multiset, Selection, Custom };

std::string family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

/// Tail behaviour of a finite parameter table.
enum class TableTail { Zero, RepeatLast, Error };

/// Recipe for the per-size parameters: a_j for assemblies, m_j for
/// multisets/selections.  Evaluated lazily and memoized per j.
struct ParamGen {
  struct Preset {
    std::string name;
    std::vector<Rat> args;
  };
  // E Z_j ~ c * y^j * j^alpha.  Exact only when alpha is an integer.
  struct RegularlyVarying {
    Rat c;
    Rat alpha;
    Rat y;
  };
  struct Table {
    std::vector<Rat> entries;  // 1-based: entries[0] is the j=1 value
    TableTail tail = TableTail::Error;
  };

  std::variant<Preset, RegularlyVarying, Table> kind;

  static ParamGen preset(std::string name, std::vector<Rat> args = {});
  static ParamGen regularly_varying(Rat c, Rat alpha, Rat y);
  static ParamGen table(std::vector<Rat> entries, TableTail tail);
};

/// Number of lattice points (l_1,...,l_d) in Z^d with sum of squares j.
/// Exact; guarded by the configured work limit.
Int sum_of_squares_count(long j, int d);

/// Structure specification: family, per-size parameters, the geometric
/// parameter p where the family needs one, and an optional exponential tilt.
///
/// All exact arithmetic runs on the scaled weights (k-th weight over the
/// zeroth); unscaled probabilities are floating conveniences only.
class WeightSpec {
 public:
  static WeightSpec assembly(ParamGen gen);
  static WeightSpec multiset(ParamGen gen, Rat p);
  static WeightSpec selection(ParamGen gen, Rat p);
  /// rows[j] lists the scaled weights (index k = 0,1,...) for size j; the
  /// 0-entry must be 1.  Sizes without a row admit no components.
  static WeightSpec custom(std::map<int, std::vector<Rat>> rows);

  /// Named preset with its natural family.  Known presets:
  ///   permutations, ewens(theta), set_partitions, graphs, forests_labelled,
  ///   oscillating_demo                                  (assemblies)
  ///   integer_partitions, plane_partitions, bose(alpha),
  ///   mapping_patterns(b), ideal_gas(d)                 (multisets, need p)
  ///   distinct_parts, fermi(alpha)                      (selections, need p)
  static WeightSpec from_preset(const std::string& name, std::vector<Rat> args,
                                std::optional<Rat> p);

  Family family() const { return family_; }
  const ParamGen& generator() const { return gen_; }
  const Rat& p() const;
  const Rat& tilt() const { return tilt_; }
  bool tilted() const { return tilt_ != 1; }
  const std::map<int, std::vector<Rat>>& custom_rows() const { return custom_; }

  /// True when every parameter is an exact rational; false for regularly
  /// varying generators with non-integer exponent, which are restricted to
  /// float-mode pipelines.
  bool exact() const;

  /// Exponentially tilted copy (scaled weight at (j,k) gains rho^{jk}).
  /// rho must lie in the tilt domain: every per-component normalizer must be
  /// finite (multisets: rho < 1/p).  rho = 0 gives the degenerate extension.
  WeightSpec tilted_by(const Rat& rho) const;

  /// a_j (assembly only).
  Rat assembly_rate(int j) const;
  /// m_j (multiset/selection only); may be 0 for presets such as ideal_gas.
  Int multiplicity(int j) const;

  /// Scaled weight: the k-th component weight over the 0-th. Exact rational.
  Rat scaled_weight(int j, int k) const;
  /// Same in log space; also defined for float-only generators.
  double scaled_weight_log(int j, int k) const;  // ln of the weight; -inf if 0

  /// Probability P(Z_j = k) as a double (the Poisson normalizer is
  /// irrational, so no exact form exists for assemblies).
  double unscaled_weight(int j, int k) const;

  /// E Z_j, exact.  Throws for float-only generators (use mean_z_f).
  Rat mean_z(int j) const;
  double mean_z_f(int j) const;

  /// Largest k with a nonzero weight, when finite (selections, custom rows).
  std::optional<long> support_bound(int j) const;

  std::string describe() const;

 private:
  WeightSpec(Family f, ParamGen gen, std::optional<Rat> p);

  void validate() const;
  Rat raw_param(int j) const;    // uncached generator evaluation
  Rat param(int j) const;        // memoized
  double param_f(int j) const;   // float-only path

  Family family_;
  ParamGen gen_;
  std::optional<Rat> p_;
  Rat tilt_ = 1;
  std::map<int, std::vector<Rat>> custom_;

  struct Memo {
    std::mutex mu;
    std::map<int, Rat> values;
  };
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

}  // namespace partlab
