#include "quadfun/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "quadfun/csv.hpp"
#include "quadfun/error.hpp"
#include "quadfun/numeric.hpp"

namespace quadfun {

std::string_view to_string(WeightKind kind) noexcept {
  switch (kind) {
    case WeightKind::constant:
      return "constant";
    case WeightKind::sobolev:
      return "sobolev";
    case WeightKind::gaussian:
      return "gaussian";
    case WeightKind::exponential:
      return "exponential";
    case WeightKind::logarithmic:
      return "logarithmic";
    case WeightKind::sinc:
      return "sinc";
    case WeightKind::custom:
      return "custom";
  }
  return "?";
}

WeightFamily::WeightFamily(WeightKind kind, double parameter, SupportRule rule)
    : kind_(kind), parameter_(parameter), rule_(rule) {
  if (!std::isfinite(parameter_) || parameter_ < 0.0) {
    throw ConfigError("weight parameter must be finite and >= 0");
  }
}

SupportRule WeightFamily::default_rule(WeightKind kind) noexcept {
  switch (kind) {
    case WeightKind::sobolev:
    case WeightKind::logarithmic:
      return SupportRule::exclude_origin;
    default:
      return SupportRule::all;
  }
}

WeightFamily WeightFamily::constant(SupportRule rule) {
  return WeightFamily(WeightKind::constant, 0.0, rule);
}

WeightFamily WeightFamily::sobolev(double s, SupportRule rule) {
  return WeightFamily(WeightKind::sobolev, s, rule);
}

WeightFamily WeightFamily::gaussian(double s, SupportRule rule) {
  return WeightFamily(WeightKind::gaussian, s, rule);
}

WeightFamily WeightFamily::exponential(double s, SupportRule rule) {
  return WeightFamily(WeightKind::exponential, s, rule);
}

WeightFamily WeightFamily::logarithmic(double s, SupportRule rule) {
  return WeightFamily(WeightKind::logarithmic, s, rule);
}

WeightFamily WeightFamily::sinc(int band, SupportRule rule) {
  if (band < 1) throw ConfigError("sinc band must be a positive integer");
  return WeightFamily(WeightKind::sinc, band, rule);
}

WeightFamily WeightFamily::custom(std::map<Frequency, double> table,
                                  SupportRule rule) {
  if (table.empty()) throw ConfigError("custom weight table is empty");
  const int dimension = table.begin()->first.dimension();
  for (const auto& [z, w] : table) {
    if (z.dimension() != dimension) {
      throw DimensionError("custom weight table mixes dimensions");
    }
    if (!std::isfinite(w) || w <= 0.0) {
      throw ConfigError("custom weight at " + z.to_string() +
                        " must be finite and positive");
    }
    if (!is_negation_symmetric(rule) && !admits(rule, -z)) continue;
    const auto mirror = table.find(-z);
    if (mirror == table.end() || mirror->second != w) {
      throw ConfigError("custom weight table is not negation-symmetric at " +
                        z.to_string());
    }
  }
  WeightFamily family(WeightKind::custom, 0.0, rule);
  family.table_ =
      std::make_shared<const std::map<Frequency, double>>(std::move(table));
  return family;
}

const std::map<Frequency, double>& WeightFamily::table() const {
  if (!table_) throw ConfigError("weight family has no table");
  return *table_;
}

WeightFamily WeightFamily::with_rule(SupportRule rule) const {
  WeightFamily copy = *this;
  copy.rule_ = rule;
  return copy;
}

bool WeightFamily::in_support(const Frequency& z) const {
  if (!admits(rule_, z)) return false;
  switch (kind_) {
    case WeightKind::constant:
    case WeightKind::gaussian:
    case WeightKind::exponential:
      return true;
    case WeightKind::sobolev:
      return parameter_ == 0.0 || !z.is_zero();
    case WeightKind::logarithmic:
      return z.l2_squared() >= 4;
    case WeightKind::sinc:
      return z.linf() <= band();
    case WeightKind::custom:
      return table_->contains(z);
  }
  return false;
}

double WeightFamily::weight_at(const Frequency& z) const {
  if (!in_support(z)) {
    throw SupportError("frequency " + z.to_string() + " outside support of " +
                       describe());
  }
  const double s = parameter_;
  switch (kind_) {
    case WeightKind::constant:
    case WeightKind::sinc:
      return 1.0;
    case WeightKind::sobolev:
      return s == 0.0 ? 1.0 : std::pow(z.l2(), -s);
    case WeightKind::gaussian:
      return std::exp(-s * static_cast<double>(z.l2_squared()));
    case WeightKind::exponential:
      return std::exp(-s * static_cast<double>(z.l1()));
    case WeightKind::logarithmic:
      return std::pow(std::log(z.l2()), -s);
    case WeightKind::custom:
      return table_->at(z);
  }
  return 1.0;
}

double WeightFamily::inverse_square(const Frequency& z) const {
  if (!in_support(z)) return 0.0;
  const double s = parameter_;
  switch (kind_) {
    case WeightKind::constant:
    case WeightKind::sinc:
      return 1.0;
    case WeightKind::sobolev:
      return s == 0.0 ? 1.0 : std::pow(static_cast<double>(z.l2_squared()), s);
    case WeightKind::gaussian:
      return std::exp(2.0 * s * static_cast<double>(z.l2_squared()));
    case WeightKind::exponential:
      return std::exp(2.0 * s * static_cast<double>(z.l1()));
    case WeightKind::logarithmic:
      return std::pow(std::log(z.l2()), 2.0 * s);
    case WeightKind::custom: {
      const double w = table_->at(z);
      return 1.0 / (w * w);
    }
  }
  return 1.0;
}

std::string WeightFamily::describe() const {
  std::string out(to_string(kind_));
  switch (kind_) {
    case WeightKind::constant:
      break;
    case WeightKind::sinc:
      out += ":" + std::to_string(band());
      break;
    case WeightKind::custom:
      out += ":<" + std::to_string(table_->size()) + " entries>";
      break;
    default: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", parameter_);
      out += ":";
      out += buf;
    }
  }
  if (rule_ != default_rule(kind_)) {
    out += "@";
    out += to_string(rule_);
  }
  return out;
}

WeightFamily load_custom_weights(std::istream& in, SupportRule rule) {
  std::map<Frequency, double> table;
  std::size_t width = 0;
  csv::for_each_record(in, [&](std::size_t line, const auto& fields) {
    if (fields.size() < 2) {
      throw ParseError("expected z_1,...,z_D,weight", line);
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " columns, got " +
                           std::to_string(fields.size()),
                       line);
    }
    std::vector<int> coords;
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
      const auto c = csv::parse_integer(fields[i]);
      if (!c || std::abs(*c) > std::numeric_limits<int>::max()) {
        throw ParseError("bad integer frequency '" + std::string(fields[i]) + "'",
                         line);
      }
      coords.push_back(static_cast<int>(*c));
    }
    const auto w = csv::parse_double(fields.back());
    if (!w || !std::isfinite(*w) || *w <= 0.0) {
      throw ParseError("weight must be a finite positive number", line);
    }
    Frequency z(std::move(coords));
    if (!table.emplace(z, *w).second) {
      throw ParseError("duplicate frequency " + z.to_string(), line);
    }
  });
  if (table.empty()) throw ParseError("weight table has no rows", 0);
  return WeightFamily::custom(std::move(table), rule);
}

WeightFamily parse_weight_spec(std::string_view spec) {
  std::string_view body = spec;
  std::optional<SupportRule> rule;
  if (const auto at = spec.rfind('@'); at != std::string_view::npos) {
    rule = parse_support_rule(spec.substr(at + 1));
    body = spec.substr(0, at);
  }
  const auto colon = body.find(':');
  const auto name = body.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : body.substr(colon + 1);

  if (name == "custom") {
    if (arg.empty()) throw ConfigError("custom weights need a CSV path");
    std::ifstream file{std::string(arg)};
    if (!file) throw ConfigError("cannot open weight table '" + std::string(arg) + "'");
    return load_custom_weights(file, rule.value_or(SupportRule::all));
  }
  if (name == "constant") {
    if (!arg.empty()) throw ConfigError("constant weights take no parameter");
    return WeightFamily::constant(rule.value_or(SupportRule::all));
  }
  if (arg.empty()) {
    throw ConfigError("weight spec '" + std::string(spec) + "' needs a parameter");
  }
  if (name == "sinc") {
    const auto band = csv::parse_integer(arg);
    if (!band || *band < 1 || *band > std::numeric_limits<int>::max()) {
      throw ConfigError("sinc band must be a positive integer");
    }
    return WeightFamily::sinc(static_cast<int>(*band),
                              rule.value_or(SupportRule::all));
  }
  const auto param = csv::parse_double(arg);
  if (!param) throw ConfigError("bad weight parameter '" + std::string(arg) + "'");
  if (name == "sobolev") {
    return WeightFamily::sobolev(*param, rule.value_or(SupportRule::exclude_origin));
  }
  if (name == "gaussian") {
    return WeightFamily::gaussian(*param, rule.value_or(SupportRule::all));
  }
  if (name == "exponential") {
    return WeightFamily::exponential(*param, rule.value_or(SupportRule::all));
  }
  if (name == "logarithmic" || name == "log") {
    return WeightFamily::logarithmic(*param,
                                     rule.value_or(SupportRule::exclude_origin));
  }
  throw ConfigError("unknown weight kind '" + std::string(name) + "'");
}

namespace {

// Ordering of decay strength; a zero parameter degenerates to constant.
int decay_rank(const WeightFamily& f) {
  const bool flat = f.parameter() == 0.0;
  switch (f.kind()) {
    case WeightKind::constant:
      return 0;
    case WeightKind::logarithmic:
      return flat ? 0 : 1;
    case WeightKind::sobolev:
      return flat ? 0 : 2;
    case WeightKind::exponential:
      return flat ? 0 : 3;
    case WeightKind::gaussian:
      return flat ? 0 : 4;
    case WeightKind::sinc:
    case WeightKind::custom:
      return -1;
  }
  return -1;
}

bool has_finite_support(const WeightFamily& f) {
  return f.kind() == WeightKind::sinc || f.kind() == WeightKind::custom;
}

void check_dimension(const WeightFamily& f, int dimension) {
  if (f.kind() == WeightKind::custom &&
      f.table().begin()->first.dimension() != dimension) {
    throw DimensionError("custom weight table dimension does not match D=" +
                         std::to_string(dimension));
  }
}

}  // namespace

bool is_consistent_pair(const WeightFamily& a, const WeightFamily& b) {
  if (has_finite_support(a) || has_finite_support(b)) return true;
  const int ra = decay_rank(a);
  const int rb = decay_rank(b);
  if (ra != rb) return rb > ra;
  return ra == 0 || b.parameter() >= a.parameter();
}

StrengthSums strength_sums(const WeightFamily& a, const WeightFamily& b,
                           int zeta, int dimension) {
  if (a.support_rule() != b.support_rule()) {
    throw ConfigError("strength sums need a shared support rule (got " +
                      std::string(to_string(a.support_rule())) + " vs " +
                      std::string(to_string(b.support_rule())) + ")");
  }
  check_dimension(a, dimension);
  check_dimension(b, dimension);
  CompensatedSum sum_a;
  CompensatedSum sum_b;
  for (const auto& z : lattice_ball(zeta, dimension, a.support_rule())) {
    if (!a.in_support(z) || !b.in_support(z)) continue;
    sum_a.add(a.inverse_square(z));
    sum_b.add(b.inverse_square(z));
  }
  return {sum_a.value(), sum_b.value()};
}

namespace {

enum class NormType { none, l1, l2 };

NormType norm_type(const WeightFamily& f) {
  if (f.parameter() == 0.0) return NormType::none;
  switch (f.kind()) {
    case WeightKind::sobolev:
    case WeightKind::gaussian:
    case WeightKind::logarithmic:
      return NormType::l2;
    case WeightKind::exponential:
      return NormType::l1;
    default:
      return NormType::none;
  }
}

// ln(a^{-2}) as a function of the family's own norm value.
double log_inverse_square(const WeightFamily& f, double norm) {
  const double s = f.parameter();
  if (s == 0.0) return 0.0;
  switch (f.kind()) {
    case WeightKind::sobolev:
      return 2.0 * s * std::log(norm);
    case WeightKind::gaussian:
      return 2.0 * s * norm * norm;
    case WeightKind::exponential:
      return 2.0 * s * norm;
    case WeightKind::logarithmic:
      return 2.0 * s * std::log(std::log(norm));
    default:
      return 0.0;
  }
}

TailRatio enumerate_tail(const WeightFamily& a, const WeightFamily& b, int zeta,
                         int dimension) {
  // One of the families has finite support; scan it.
  std::vector<Frequency> candidates;
  const auto& finite = has_finite_support(a) ? a : b;
  if (finite.kind() == WeightKind::custom) {
    for (const auto& [z, w] : finite.table()) candidates.push_back(z);
  } else {
    const auto ball = lattice_ball(finite.band(), dimension, finite.support_rule());
    candidates.assign(ball.begin(), ball.end());
  }
  double best = 0.0;
  for (const auto& z : candidates) {
    if (z.linf() <= zeta || !a.in_support(z) || !b.in_support(z)) continue;
    best = std::max(best, a.inverse_square(z) / b.inverse_square(z));
  }
  return {best, false, true};
}

}  // namespace

TailRatio tail_sup_ratio(const WeightFamily& a, const WeightFamily& b, int zeta,
                         int dimension) {
  if (zeta < 0) throw ConfigError("zeta must be >= 0");
  check_dimension(a, dimension);
  check_dimension(b, dimension);
  if (has_finite_support(a) || has_finite_support(b)) {
    return enumerate_tail(a, b, zeta, dimension);
  }
  if (!is_consistent_pair(a, b)) {
    return {std::numeric_limits<double>::infinity(), true, false};
  }

  const NormType na = norm_type(a);
  const NormType nb = norm_type(b);
  const bool mixed = na != NormType::none && nb != NormType::none && na != nb &&
                     dimension > 1;
  // Common radial variable: the shared norm, or l2 when the norms differ,
  // using ||z||_2 <= ||z||_1 <= sqrt(D) ||z||_2 to bound the ratio above.
  const NormType common = mixed ? NormType::l2
                          : na != NormType::none ? na
                                                 : nb;
  const double sqrt_d = std::sqrt(static_cast<double>(dimension));
  const auto own_norm = [&](NormType own, double rho, bool numerator) {
    if (!mixed || own == NormType::l2) return rho;
    return numerator ? sqrt_d * rho : rho;  // own is l1
  };
  const auto log_ratio = [&](double rho) {
    return log_inverse_square(a, own_norm(na, rho, true)) -
           log_inverse_square(b, own_norm(nb, rho, false));
  };

  const Frequency anchor = shell_anchor(zeta + 1, dimension, a.support_rule());
  double rho0 = common == NormType::l1 ? static_cast<double>(anchor.l1())
                                       : anchor.l2();
  const bool log_family = a.kind() == WeightKind::logarithmic ||
                          b.kind() == WeightKind::logarithmic;
  bool anchor_usable = a.in_support(anchor) && b.in_support(anchor);
  if (log_family && rho0 < 2.0) {
    rho0 = 2.0;
    anchor_usable = false;
  }

  // Every built-in log-ratio is unimodal in rho: locate the peak on [rho0, inf).
  const double h0 = log_ratio(rho0);
  double hi = std::max(2.0 * rho0, rho0 + 1.0);
  while (log_ratio(hi) > log_ratio(0.5 * (rho0 + hi)) && hi < 1e12) hi *= 2.0;
  double lo = rho0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (log_ratio(m1) < log_ratio(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double peak = log_ratio(0.5 * (lo + hi));
  const bool decreasing = peak <= h0 + 1e-12 * std::max(1.0, std::abs(h0));

  if (decreasing && !mixed && anchor_usable) {
    return {a.inverse_square(anchor) / b.inverse_square(anchor), false, true};
  }
  return {std::exp(std::max(h0, peak)), false, false};
}

double variance_functional(const WeightFamily& a, const WeightFamily& b,
                           const FrequencySet& frequencies) {
  CompensatedSum first;
  CompensatedSum second;
  CompensatedSum third;
  for (const auto& z : frequencies) {
    if (!a.in_support(z) || !b.in_support(z)) continue;
    const double ia = a.inverse_square(z);  // a^{-2}
    const double ib = b.inverse_square(z);  // b^{-2}
    first.add(ia * ia * ia * ia / (ib * ib));                 // b^4 / a^8
    second.add(std::pow(ia, 8.0) / std::pow(ib, 4.0));        // (b / a^2)^8
    third.add(1.0 / std::pow(ib, 4.0));                       // b^8
  }
  return std::pow(first.value(), 0.25) * std::pow(second.value(), 0.125) *
         std::pow(third.value(), 0.125);
}

}  // namespace quadfun
