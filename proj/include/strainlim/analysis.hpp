#pragma once

// Convergence-order studies for the small-δ reduction of E = f_δ(E, S̄)
// (and its Hencky/Cauchy analogue), plus sampled certification of the
// family constants C₀, C₁, D₀ and the leading-order constant C₃.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strainlim/families.hpp"
#include "strainlim/kinematics.hpp"
#include "strainlim/solver.hpp"

namespace strainlim {

enum class StrainMeasure { green, hencky };

struct ConvergenceRow {
  double delta = 0.0;
  double delta0 = 0.0;            // |F_δ − I|
  double residual_full = 0.0;     // |ε_δ − f_δ(ε_δ, σ_δ)|
  double residual_leading = 0.0;  // |ε_δ − δ f₁(ε_δ/δ, σ_δ)|
  double stress_gap = 0.0;        // |σ_δ − S̄| (or |σ_δ − T|)
  double strain_gap = 0.0;        // |E_δ − ε_δ| (or |H_δ − ε_δ|)
  double solution_norm = 0.0;     // |E_δ| (or |H_δ|)
  int solver_iterations = 0;
  bool in_domain = false;         // (ε_δ, σ_δ) ∈ U_δ × V
  bool interior_ball_ok = false;  // B(E_δ, rδ) ⊆ U_δ
  bool ok = false;
  std::string failure;
};

struct ConvergenceReport {
  StrainMeasure measure = StrainMeasure::green;
  std::vector<ConvergenceRow> records;
  /// nullopt when every residual in the series is exactly zero.
  std::optional<double> fitted_order_full;
  std::optional<double> fitted_order_leading;
  std::optional<double> fitted_order_stress;
  std::optional<double> fitted_order_strain;
  /// log(r_i/r_{i+1}) / log(δ_i/δ_{i+1}) for consecutive successful rows.
  std::vector<double> richardson_full;

  [[nodiscard]] std::size_t successful_rows() const;
};

struct ConvergenceOptions {
  DomainPolicy domain = DomainPolicy::enforce;
  SolveOptions solver;
};

/// δ_k = 2^{-k}, k = 6..13.
std::vector<double> default_delta_ladder();

ConvergenceReport run_convergence(const FamilySpec& spec, const SymTensor& Sbar, const RotationSpec& rot,
                                  std::span<const double> deltas, const ConvergenceOptions& options = {});

ConvergenceReport run_convergence_hencky(const FamilySpec& spec, const SymTensor& T, const RotationSpec& rot,
                                         std::span<const double> deltas, const ConvergenceOptions& options = {});

/// Plain least-squares slope of log y against log x. No validation beyond
/// positivity of the inputs.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Order fit with the study's rules: ≥ 4 entries, zeros excluded; throws
/// AllZeroResiduals or FitUnderdetermined.
double fit_order(std::span<const double> deltas, std::span<const double> residuals);

std::vector<double> richardson_orders(std::span<const double> deltas, std::span<const double> residuals);

/// Upper bound on |F_δ − I| when F_δ = R_δ(I + 2E_δ)^{1/2}, |E_δ| ≤ C₀δ and
/// |R_δ − I| ≤ C₂δ.
double green_gradient_bound(double C0, double C2, double delta);

/// Same for F_δ = e^{H_δ}R_δ: (C₂ + C₀)e^{C₀δ}δ.
double hencky_gradient_bound(double C0, double C2, double delta);

struct CertificateRow {
  double delta = 0.0;
  double C0_hat = 0.0;
  double C1_hat = 0.0;
  double D0_hat = 0.0;
  double C3_hat = 0.0;
};

struct CertificateReport {
  std::vector<CertificateRow> rows;
  double C0_hat = 0.0;
  double C1_hat = 0.0;
  double D0_hat = 0.0;
  double C3_hat = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Relative distance of difference-quotient partners, in units of the
/// domain radius.
inline constexpr double kProbeScale = 1e-3;

/// One draw of the certification: (E, S̄) uniform in the shrunken domain
/// balls and partners E₂, S̄₂ at distance kProbeScale times the radius.
struct CertificateSample {
  SymTensor E, S, E2, S2;
};

/// The draws used for row `index` of certify_constants with this seed.
std::vector<CertificateSample> certification_samples(const FamilySpec& spec, double delta, std::size_t index,
                                                     int samples, std::uint64_t seed);

CertificateReport certify_constants(const FamilySpec& spec, std::span<const double> deltas, int samples,
                                    std::uint64_t seed);

}  // namespace strainlim
