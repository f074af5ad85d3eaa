#pragma once

// One-dimensional strain-limiting relation E = δa(1 + |aS̄|ᵖ)^{-1/p}S̄, its exact
// inverse, and the comparison of δ- versus δ₀-linearization.

#include <optional>
#include <span>
#include <vector>

namespace strainlim {

struct Scalar1DParams {
  double a = 1.0;
  double p = 2.0;
  double delta = 1e-3;

  void validate() const;
};

double oned_forward(const Scalar1DParams& params, double Sbar);

/// ε = −1 + (1 + 2E)^{1/2}, the root of E = ε + ε²/2 near zero.
double oned_strain(double E);

/// Inverse of oned_forward; throws Saturation once |E/δ| ≥ 1.
double oned_invert(const Scalar1DParams& params, double E);

struct OneDRow {
  double Sbar = 0.0;
  double E = 0.0;
  double eps = 0.0;
  double delta0 = 0.0;
  double sigma = 0.0;  // ε/(aδ)
  double gap = 0.0;    // |σ − S̄|
};

struct OneDStudy {
  std::vector<OneDRow> rows;
  /// Least-squares slope of log gap against log δ₀ over rows with gap > 0.
  std::optional<double> gap_slope;
  /// max over rows of gap·δ / (|S̄|·δ₀).
  double max_linear_ratio = 0.0;
  /// max over rows of gap·aδ² / δ₀².
  double max_quadratic_ratio = 0.0;
};

OneDStudy oned_delta0_study(const Scalar1DParams& params, std::span<const double> Sbar);

}  // namespace strainlim
