#pragma once

#include <istream>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "quadfun/frequency.hpp"

namespace quadfun {

enum class WeightKind {
  constant,
  sobolev,      // ||z||_2^{-s}
  gaussian,     // exp(-s ||z||_2^2)
  exponential,  // exp(-s ||z||_1)
  logarithmic,  // (ln ||z||_2)^{-s}, defined for ||z||_2 >= 2
  sinc,         // 1 inside the band ||z||_inf <= s, absent outside
  custom,       // explicit table
};

std::string_view to_string(WeightKind kind) noexcept;

/// A positive, negation-symmetric weight net {a_z} on a subset of Z^D.
///
/// The support is the intersection of the support rule with the kind's own
/// domain (nonzero z for sobolev with s > 0, ||z||_2 >= 2 for logarithmic,
/// the band for sinc, the table keys for custom). Frequencies outside the
/// support are absent terms: they contribute zero to every weighted sum.
class WeightFamily {
 public:
  static WeightFamily constant(SupportRule rule = SupportRule::all);
  static WeightFamily sobolev(double s, SupportRule rule = SupportRule::exclude_origin);
  static WeightFamily gaussian(double s, SupportRule rule = SupportRule::all);
  static WeightFamily exponential(double s, SupportRule rule = SupportRule::all);
  static WeightFamily logarithmic(double s,
                                  SupportRule rule = SupportRule::exclude_origin);
  static WeightFamily sinc(int band, SupportRule rule = SupportRule::all);
  /// Validates positivity, a common dimension, and negation symmetry.
  static WeightFamily custom(std::map<Frequency, double> table,
                             SupportRule rule = SupportRule::all);

  static SupportRule default_rule(WeightKind kind) noexcept;

  WeightKind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  int band() const noexcept { return static_cast<int>(parameter_); }
  SupportRule support_rule() const noexcept { return rule_; }
  const std::map<Frequency, double>& table() const;

  WeightFamily with_rule(SupportRule rule) const;

  bool in_support(const Frequency& z) const;

  /// a_z. Throws SupportError outside the support.
  double weight_at(const Frequency& z) const;

  /// a_z^{-2}, or 0 for frequencies outside the support.
  double inverse_square(const Frequency& z) const;

  /// Spec string in the `kind:param@rule` grammar (custom tables print as
  /// `custom:<n entries>`).
  std::string describe() const;

 private:
  WeightFamily(WeightKind kind, double parameter, SupportRule rule);

  WeightKind kind_;
  double parameter_;
  SupportRule rule_;
  std::shared_ptr<const std::map<Frequency, double>> table_;
};

/// Parses `kind[:param][@rule]`; `custom:<path>` loads a CSV weight table.
WeightFamily parse_weight_spec(std::string_view spec);

/// CSV with columns z_1,...,z_D,weight. Rejects non-finite or nonpositive
/// weights, duplicate frequencies and ragged rows.
WeightFamily load_custom_weights(std::istream& in,
                                 SupportRule rule = SupportRule::all);

/// True when b_z / a_z stays bounded (b at least as strong as a).
bool is_consistent_pair(const WeightFamily& a, const WeightFamily& b);

struct StrengthSums {
  double a = 0.0;  // A_zeta = sum a_z^{-2}
  double b = 0.0;  // B_zeta = sum b_z^{-2}
};

/// Cumulative strengths over the shared support inside ||z||_inf <= zeta,
/// accumulated with compensation in lexicographic order.
StrengthSums strength_sums(const WeightFamily& a, const WeightFamily& b,
                           int zeta, int dimension);

struct TailRatio {
  double value = 0.0;
  bool inconsistent = false;
  /// False when value is the continuous radial supremum, an upper bound on
  /// the lattice supremum, rather than the attained lattice value.
  bool exact = true;
};

/// sup over z outside ||z||_inf <= zeta of b_z^2 / a_z^2.
TailRatio tail_sup_ratio(const WeightFamily& a, const WeightFamily& b, int zeta,
                         int dimension);

/// R_{a,b,Z}: the three-factor Holder product in the variance bound.
double variance_functional(const WeightFamily& a, const WeightFamily& b,
                           const FrequencySet& frequencies);

}  // namespace quadfun
