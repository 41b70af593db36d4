#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadfun/frequency.hpp"
#include "quadfun/spectral.hpp"
#include "quadfun/weights.hpp"

namespace quadfun {

/// g(x) = 1 + sum_z alpha_z sqrt(2) cos(2 pi <z, x>) on [0,1)^D.
///
/// Keys are canonical nonzero frequencies (first nonzero coordinate positive),
/// so each cosine appears once. The complex coefficient of g at +-z is
/// alpha_z / sqrt(2) and at the origin is 1.
class ReferenceDensity {
 public:
  static ReferenceDensity uniform(int dimension);

  /// With validate = true the density is checked for nonnegativity on a grid
  /// of 64 * max(1, max ||z||_inf) points per axis; throws
  /// NonnegativityViolation when the grid minimum is below -1e-12.
  ReferenceDensity(int dimension, std::map<Frequency, double> amplitudes,
                   bool validate = true);

  int dimension() const noexcept { return dimension_; }
  const std::map<Frequency, double>& amplitudes() const noexcept { return amplitudes_; }
  bool validated() const noexcept { return validated_; }

  /// Largest ||z||_inf among the terms (0 for the uniform density).
  int bandwidth() const noexcept;
  /// Rejection envelope 1 + sqrt(2) sum |alpha|.
  double envelope() const noexcept;

  /// Pointwise value; x is not range-checked.
  double evaluate(std::span<const double> x) const;

  struct GridMinimum {
    double value = 0.0;
    std::vector<double> point;
  };
  /// Minimum over the product grid {k / points}^D, evaluated with exact
  /// integer phase indices.
  GridMinimum grid_minimum(int points_per_axis) const;
  int validation_grid() const noexcept { return 64 * std::max(1, bandwidth()); }

  /// Exact characteristic function on every frequency with a nonzero
  /// coefficient (both signs and the origin).
  SpectralProfile spectrum() const;

 private:
  int dimension_;
  std::map<Frequency, double> amplitudes_;
  bool validated_ = false;
};

/// Validated density built from amplitudes.
ReferenceDensity make_trig_density(int dimension, std::map<Frequency, double> amplitudes);

nlohmann::json density_to_json(const ReferenceDensity& density);
/// {"dimension": D, "amplitudes": [{"z": [..], "amplitude": x}, ...]}
ReferenceDensity density_from_json(const nlohmann::json& doc, bool validate = true);

enum class WorstCaseRegime { smooth, unsmooth };

std::string_view to_string(WorstCaseRegime regime) noexcept;

/// The index set {1..zeta}^D in lexicographic order; signs vectors follow it.
std::vector<Frequency> positive_orthant(int zeta, int dimension);
/// tau_z = (-1)^{||z||_1 + 1}: every term is -1 at x = (1/2, ..., 1/2), so the
/// construction is nonnegative exactly when c sqrt(2) zeta^D <= 1.
std::vector<int> alternating_signs(int zeta, int dimension);
std::vector<int> random_signs(int zeta, int dimension, std::uint64_t seed);

struct WorstCase {
  ReferenceDensity density;
  int zeta = 0;
  int dimension = 0;
  double scale = 0.0;        // c
  double strength_b = 0.0;   // B over the positive orthant
  WorstCaseRegime regime = WorstCaseRegime::smooth;
  std::vector<int> signs;
  bool analytic_condition = false;  // c sqrt(2) zeta^D <= 1
};

/// g = 1 + c sum_z tau_z sqrt(2) cos(2 pi <z, x>) over {1..zeta}^D with
/// c = B^{-1/2} (smooth) or zeta^{-D} (unsmooth). validate = false skips the
/// nonnegativity check.
WorstCase make_worst_case(int zeta, const std::vector<int>& signs, const WeightFamily& b,
                          int dimension, WorstCaseRegime regime, bool validate = true);

/// sum over frequencies present in both spectra (and in `frequencies`, when
/// given) of phi_p(z) conj(phi_q(z)) / a_z^2. Frequencies outside a's support
/// are absent terms and contribute 0.
double exact_product(const ReferenceDensity& p, const ReferenceDensity& q,
                     const WeightFamily& a,
                     const FrequencySet* frequencies = nullptr);

/// Pointwise value with a torus range check (DomainError).
double density_eval(const ReferenceDensity& p, std::span<const double> x);

/// Rejection sampling: proposals uniform on [0,1)^D, accepted when
/// u * M < g(x). Uses one RandomStream(seed); the uniform density consumes
/// no acceptance draws, so its output is the proposal stream itself.
SampleSet sample(const ReferenceDensity& p, std::size_t n, std::uint64_t seed,
                 std::string label = {});

struct WorstCaseReport {
  double norm_b_sq = 0.0;
  bool norm_ok = false;
  double gap = 0.0;
  double expected_gap = 0.0;
  bool gap_ok = false;
  bool degenerate = false;  // no perturbation at all
  bool integral_ok = false;
  double grid_min = 0.0;
  bool nonnegative_ok = false;
  double tv = 0.0;
  std::vector<std::string> failures;
  bool ok() const noexcept { return failures.empty(); }
};

/// Checks the four lower-bound claims for a worst-case density: ||g||_b^2 = 1
/// (<= 1 unsmooth), the a-norm gap A/B (A/zeta^{2D} unsmooth) to 1e-12,
/// unit mass, and grid nonnegativity. Also reports tv_bound(n, c, zeta, D)
/// with c read off the amplitudes.
WorstCaseReport validate_worst_case(const ReferenceDensity& g, const WeightFamily& b,
                                    const WeightFamily& a, int zeta, int dimension,
                                    WorstCaseRegime regime, double n);

}  // namespace quadfun
