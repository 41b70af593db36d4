#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace quadfun {

inline constexpr int kDefaultMaxDimension = 8;

/// A point of the integer lattice Z^D.
class Frequency {
 public:
  Frequency() = default;
  explicit Frequency(std::vector<int> coords);
  Frequency(std::initializer_list<int> coords) : coords_(coords) {}

  int dimension() const noexcept { return static_cast<int>(coords_.size()); }
  const std::vector<int>& coords() const noexcept { return coords_; }
  int operator[](std::size_t i) const { return coords_[i]; }

  Frequency operator-() const;
  bool is_zero() const noexcept;

  long long l1() const noexcept;
  long long l2_squared() const noexcept;
  double l2() const noexcept;
  int linf() const noexcept;

  /// True when z is the lexicographically leading member of {z, -z}: its first
  /// nonzero coordinate is positive. The origin counts as canonical.
  bool is_canonical() const noexcept;

  std::string to_string() const;

  auto operator<=>(const Frequency&) const = default;
  bool operator==(const Frequency&) const = default;

 private:
  std::vector<int> coords_;
};

/// Exclusion predicate applied on top of the l-infinity ball.
enum class SupportRule {
  all,
  exclude_origin,
  positive_orthant,  // every coordinate in {1, 2, ...}
  nonzero_coords,    // every coordinate nonzero
};

bool admits(SupportRule rule, const Frequency& z) noexcept;
bool is_negation_symmetric(SupportRule rule) noexcept;
std::string_view to_string(SupportRule rule) noexcept;
SupportRule parse_support_rule(std::string_view name);

/// Finite, duplicate-free, lexicographically sorted set of frequencies inside
/// the l-infinity ball of the given radius.
class FrequencySet {
 public:
  FrequencySet(int dimension, int radius, SupportRule rule,
               std::vector<Frequency> members);

  int dimension() const noexcept { return dimension_; }
  int radius() const noexcept { return radius_; }
  SupportRule rule() const noexcept { return rule_; }
  const std::vector<Frequency>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(const Frequency& z) const;
  bool is_negation_closed() const;

  FrequencySet filtered(const std::function<bool(const Frequency&)>& keep) const;

 private:
  int dimension_;
  int radius_;
  SupportRule rule_;
  std::vector<Frequency> members_;
};

/// All z in Z^D with ||z||_inf <= radius that pass the support rule, in
/// lexicographic order.
FrequencySet lattice_ball(int radius, int dimension, SupportRule rule,
                          int max_dimension = kDefaultMaxDimension);

/// Calls visit(z) for every z with ||z||_inf == radius (any rule), in
/// lexicographic order. radius 0 visits only the origin.
void for_each_on_shell(int radius, int dimension,
                       const std::function<void(const Frequency&)>& visit);

/// Minimal-norm point of the shell ||z||_inf == radius admitted by the rule:
/// (radius, m, ..., m) with m = 1 when the rule forbids zero coordinates.
Frequency shell_anchor(int radius, int dimension, SupportRule rule);

}  // namespace quadfun
