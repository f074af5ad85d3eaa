#pragma once

// Strain-limiting families f_δ(E, S̄): bounded by C₀δ, Lipschitz in E with a
// δ-independent constant, and Lipschitz in S̄ with a constant of order δ.

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "strainlim/symtensor.hpp"

namespace strainlim {

enum class FamilyKind {
  scaled_base,
  power_law,
  density_modulus_reciprocal,
  density_modulus_direct,
};

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

/// Base response f : U × V → Sym for the scaled construction
/// f_δ(E, S̄) = (δ/δ₁)·f(δ₁E/δ, S̄). `name` identifies a built-in base so the
/// FamilySpec can round-trip through JSON; custom bases use any other name.
struct BaseProfile {
  std::string name;
  std::function<SymTensor(const SymTensor& E, const SymTensor& Sbar)> response;
  /// Optional complementary energy of the base at δ₁ scale, W*_base with
  /// ∂W*_base/∂S̄ = f(·, S̄)/δ₁ for stress-only bases.
  std::function<double(const SymTensor& Sbar)> potential;
  bool stress_only = false;
};

/// Built-in bases: "zero", "power_law" (δ₁·a(1 + aᵖ|S̄|ᵖ)^{-1/p}S̄), and
/// "density_modulus_reciprocal" (the reciprocal family evaluated at δ₁).
BaseProfile builtin_base(const std::string& name, double a, double p, double E0, double nu, double delta1);

struct FamilySpec {
  FamilyKind kind = FamilyKind::power_law;
  double a = 0.3;
  double p = 2.0;
  double E0 = 1.0;
  double nu = 0.3;
  double b = 0.5;
  double c = 1.0;
  double delta1 = 0.1;
  /// Overrides the default admissible-δ ceiling when set.
  std::optional<double> delta_max;
  /// scaled_base only. Built from `base_name` when empty.
  std::string base_name = "zero";
  BaseProfile base;

  /// Throws InvalidArgument if parameters violate the kind's constraints.
  void validate() const;
  /// Resolve `base` from `base_name` if it has no response yet.
  FamilySpec& bind_base();

  static FamilySpec power_law(double a, double p);
  static FamilySpec density_reciprocal(double E0, double nu, double a, double b, double c);
  static FamilySpec density_direct(double E0, double nu, double a, double b, double c);
  static FamilySpec scaled(BaseProfile base, double delta1, double b, double c);
};

/// U_δ = B(0, strain_radius(δ)), V = B(0, stress_radius).
struct DomainSpec {
  double strain_radius = 0.0;
  double stress_radius = std::numeric_limits<double>::infinity();

  /// Interior-ball radius r·δ used for the B(E_δ, rδ) ⊆ U_δ check.
  [[nodiscard]] double interior_radius() const { return 0.5 * strain_radius; }
  [[nodiscard]] bool contains_strain(const SymTensor& E) const;
  [[nodiscard]] bool contains_stress(const SymTensor& S) const;
};

inline constexpr double kPowerLawStrainMargin = 0.05;

double admissible_delta(const FamilySpec& spec);
DomainSpec domain(const FamilySpec& spec, double delta);

/// Whether family_eval ignores its first argument.
bool stress_only(const FamilySpec& spec);

/// f_δ(E, S̄) with full domain and δ-admissibility checks.
SymTensor family_eval(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& Sbar);

/// f_δ(E, S̄) checking only that the formula is defined (δ admissible,
/// I + 2E positive definite, modulus positive). Used where a study records
/// domain membership instead of rejecting it.
SymTensor family_eval_unchecked(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& Sbar);

/// Density-dependent generalized Young's modulus E_δ(E).
double generalized_modulus(const FamilySpec& spec, double delta, const SymTensor& E);

/// Leading-order profile f₁(Ẽ, S̄) on the rescaled domain.
SymTensor family_leading(const FamilySpec& spec, const SymTensor& Etilde, const SymTensor& Sbar);

/// f₁ without the rescaled-domain check; still throws SingularLeading.
SymTensor family_leading_unchecked(const FamilySpec& spec, const SymTensor& Etilde, const SymTensor& Sbar);

/// |f_δ(E, S̄) − δ·f₁(E/δ, S̄)|.
double leading_gap(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& Sbar);

/// Closed-form constants from the density-family estimates.
double density_bound_C0(const FamilySpec& spec);                 // (1+4ν)c / (E₀(1−2ab))
double density_lipschitz_E(const FamilySpec& spec);              // (1+4ν)ac√2 / (E₀(1−2ab)²)
double density_lipschitz_S(const FamilySpec& spec);              // (1+4ν) / (E₀(1−2ab))

}  // namespace strainlim
