#include "quadfun/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "quadfun/error.hpp"

namespace quadfun {

Frequency::Frequency(std::vector<int> coords) : coords_(std::move(coords)) {}

Frequency Frequency::operator-() const {
  std::vector<int> neg(coords_.size());
  std::transform(coords_.begin(), coords_.end(), neg.begin(),
                 [](int c) { return -c; });
  return Frequency(std::move(neg));
}

bool Frequency::is_zero() const noexcept {
  return std::all_of(coords_.begin(), coords_.end(),
                     [](int c) { return c == 0; });
}

long long Frequency::l1() const noexcept {
  long long s = 0;
  for (int c : coords_) s += std::llabs(c);
  return s;
}

long long Frequency::l2_squared() const noexcept {
  long long s = 0;
  for (int c : coords_) s += static_cast<long long>(c) * c;
  return s;
}

double Frequency::l2() const noexcept {
  return std::sqrt(static_cast<double>(l2_squared()));
}

int Frequency::linf() const noexcept {
  int m = 0;
  for (int c : coords_) m = std::max(m, std::abs(c));
  return m;
}

bool Frequency::is_canonical() const noexcept {
  for (int c : coords_) {
    if (c != 0) return c > 0;
  }
  return true;
}

std::string Frequency::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(coords_[i]);
  }
  return out + ")";
}

bool admits(SupportRule rule, const Frequency& z) noexcept {
  const auto& c = z.coords();
  switch (rule) {
    case SupportRule::all:
      return true;
    case SupportRule::exclude_origin:
      return !z.is_zero();
    case SupportRule::positive_orthant:
      return std::all_of(c.begin(), c.end(), [](int v) { return v >= 1; });
    case SupportRule::nonzero_coords:
      return std::all_of(c.begin(), c.end(), [](int v) { return v != 0; });
  }
  return false;
}

bool is_negation_symmetric(SupportRule rule) noexcept {
  return rule != SupportRule::positive_orthant;
}

std::string_view to_string(SupportRule rule) noexcept {
  switch (rule) {
    case SupportRule::all:
      return "all";
    case SupportRule::exclude_origin:
      return "exclude_origin";
    case SupportRule::positive_orthant:
      return "positive_orthant";
    case SupportRule::nonzero_coords:
      return "nonzero_coords";
  }
  return "?";
}

SupportRule parse_support_rule(std::string_view name) {
  if (name == "all") return SupportRule::all;
  if (name == "exclude_origin") return SupportRule::exclude_origin;
  if (name == "positive_orthant") return SupportRule::positive_orthant;
  if (name == "nonzero_coords") return SupportRule::nonzero_coords;
  throw ConfigError("unknown support rule '" + std::string(name) + "'");
}

FrequencySet::FrequencySet(int dimension, int radius, SupportRule rule,
                           std::vector<Frequency> members)
    : dimension_(dimension), radius_(radius), rule_(rule),
      members_(std::move(members)) {
  if (dimension_ < 1) throw DimensionError("frequency set dimension must be >= 1");
  if (radius_ < 0) throw ConfigError("frequency set radius must be >= 0");
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw ConfigError("frequency set contains duplicates");
  }
  for (const auto& z : members_) {
    if (z.dimension() != dimension_) {
      throw DimensionError("frequency " + z.to_string() +
                           " does not match set dimension " +
                           std::to_string(dimension_));
    }
    if (z.linf() > radius_) {
      throw ConfigError("frequency " + z.to_string() + " lies outside radius " +
                        std::to_string(radius_));
    }
  }
}

bool FrequencySet::contains(const Frequency& z) const {
  return std::binary_search(members_.begin(), members_.end(), z);
}

bool FrequencySet::is_negation_closed() const {
  return std::all_of(members_.begin(), members_.end(),
                     [this](const Frequency& z) { return contains(-z); });
}

FrequencySet FrequencySet::filtered(
    const std::function<bool(const Frequency&)>& keep) const {
  std::vector<Frequency> kept;
  kept.reserve(members_.size());
  std::copy_if(members_.begin(), members_.end(), std::back_inserter(kept), keep);
  return FrequencySet(dimension_, radius_, rule_, std::move(kept));
}

namespace {

void check_dimension(int dimension, int max_dimension) {
  if (dimension < 1 || dimension > max_dimension) {
    throw DimensionError("dimension " + std::to_string(dimension) +
                         " outside [1, " + std::to_string(max_dimension) + "]");
  }
}

}  // namespace

FrequencySet lattice_ball(int radius, int dimension, SupportRule rule,
                          int max_dimension) {
  check_dimension(dimension, max_dimension);
  if (radius < 0) throw ConfigError("radius must be >= 0");

  std::vector<Frequency> members;
  std::vector<int> coords(dimension, -radius);
  // Odometer over [-radius, radius]^D; the last coordinate varies fastest so
  // the output is already in lexicographic order.
  while (true) {
    Frequency z(coords);
    if (admits(rule, z)) members.push_back(std::move(z));
    int d = dimension - 1;
    while (d >= 0 && coords[d] == radius) {
      coords[d] = -radius;
      --d;
    }
    if (d < 0) break;
    ++coords[d];
  }
  return FrequencySet(dimension, radius, rule, std::move(members));
}

namespace {

void shell_recurse(int radius, int depth, bool hit, std::vector<int>& coords,
                   const std::function<void(const Frequency&)>& visit) {
  const int dimension = static_cast<int>(coords.size());
  if (depth == dimension) {
    if (hit) visit(Frequency(coords));
    return;
  }
  if (depth == dimension - 1 && !hit) {
    // Only the two faces remain.
    for (int v : {-radius, radius}) {
      coords[depth] = v;
      visit(Frequency(coords));
    }
    return;
  }
  for (int v = -radius; v <= radius; ++v) {
    coords[depth] = v;
    shell_recurse(radius, depth + 1, hit || std::abs(v) == radius, coords, visit);
  }
}

}  // namespace

void for_each_on_shell(int radius, int dimension,
                       const std::function<void(const Frequency&)>& visit) {
  check_dimension(dimension, kDefaultMaxDimension);
  if (radius < 0) throw ConfigError("radius must be >= 0");
  std::vector<int> coords(dimension, 0);
  if (radius == 0) {
    visit(Frequency(coords));
    return;
  }
  shell_recurse(radius, 0, false, coords, visit);
}

Frequency shell_anchor(int radius, int dimension, SupportRule rule) {
  const bool needs_nonzero = rule == SupportRule::positive_orthant ||
                             rule == SupportRule::nonzero_coords;
  std::vector<int> coords(dimension, needs_nonzero ? 1 : 0);
  coords[0] = radius;
  return Frequency(std::move(coords));
}

}  // namespace quadfun
