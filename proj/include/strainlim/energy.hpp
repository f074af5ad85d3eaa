#pragma once

// Complementary energy W*(S̄) with ∂W*/∂S̄ = f₁(S̄), its Legendre transform
// W(Ẽ), and the stress of the linearized Green-elastic solid.

#include <limits>

#include "strainlim/families.hpp"

namespace strainlim {

struct EnergyProfile {
  FamilySpec family;
  int quadrature_points = 64;
  /// V for the energy checks. Unbounded by default: Legendre pairs with
  /// |Ẽ| near 1 need |S̄| well beyond the family's stress radius.
  double stress_radius = std::numeric_limits<double>::infinity();

  /// power_law, or scaled_base over a stress-only base with a potential.
  void validate() const;
};

/// G(s) = ∫₀ˢ a·t(1 + aᵖtᵖ)^{-1/p} dt by adaptive Gauss–Kronrod quadrature.
double radial_potential_quadrature(double a, double p, double s, int quadrature_points);

/// W*(S̄), normalized so that W*(0) = 0. Closed form when p = 2.
double complementary_energy(const EnergyProfile& profile, const SymTensor& Sbar);

/// S̄ with f₁(S̄) = Ẽ. Throws Saturation outside the range of f₁.
SymTensor leading_inverse(const EnergyProfile& profile, const SymTensor& Etilde);

/// W(Ẽ) = Ẽ·S̄ − W*(S̄) at the maximizer S̄ = f₁⁻¹(Ẽ).
double legendre_transform(const EnergyProfile& profile, const SymTensor& Etilde);

/// ∂_ε[δ W(ε/δ)] by central differences of W.
SymTensor green_stress(const EnergyProfile& profile, double delta, const SymTensor& eps);

/// Central-difference gradient of W* with step 10⁻⁵·max(1, |S̄|).
SymTensor complementary_energy_gradient(const EnergyProfile& profile, const SymTensor& Sbar);

}  // namespace strainlim
