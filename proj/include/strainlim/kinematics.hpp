#pragma once

#include <array>

#include "strainlim/symtensor.hpp"

namespace strainlim {

/// A one-parameter rotation family R_δ = exp(δ·k·W), W the cross-product
/// matrix of a unit axis (|W| = √2), k = magnitude_coefficient.
struct RotationSpec {
  std::array<double, 3> axis{1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
  double magnitude_coefficient = 1.0;
};

/// Frobenius norm of the skew generator W for a unit axis.
inline constexpr double kSkewNorm = 1.4142135623730951;

/// Upper bound on |R_δ − I| for the exponential family: |δkW|·e^{|δkW|}.
double rotation_bound(const RotationSpec& spec, double delta);

/// Every strain and stretch measure of one deformation gradient.
struct DeformationState {
  Tensor3 F = Tensor3::identity();
  SymTensor C = SymTensor::identity();  // FᵀF
  SymTensor B = SymTensor::identity();  // FFᵀ
  SymTensor E;                          // ½(C − I)
  SymTensor eps;                        // ½(F + Fᵀ) − I
  SymTensor H;                          // ½ log B
  double density_ratio = 1.0;           // ρ/ρ_R = 1/det F

  /// δ₀ = |F − I|.
  [[nodiscard]] double displacement_gradient_norm() const;
};

/// Populate every field from F. Requires det F > 0.
DeformationState state_from_gradient(const Tensor3& F);

SymTensor green_strain(const Tensor3& F);
SymTensor linearized_strain(const Tensor3& F);
SymTensor hencky_strain(const Tensor3& F);

/// Rodrigues closed form. Throws InvalidAxis when |axis| is off by > 1e-8.
Tensor3 make_rotation(const RotationSpec& spec, double delta);

/// F = R·(I + 2E)^{1/2}.
DeformationState deformation_from_green(const SymTensor& E, const Tensor3& R);

/// F = e^H·R.
DeformationState deformation_from_hencky(const SymTensor& H, const Tensor3& R);

/// ½(F·S̄ + S̄·Fᵀ), the symmetric part of the first Piola-Kirchhoff stress.
SymTensor sigma_from_piola(const Tensor3& F, const SymTensor& Sbar);

/// det F·½(T·F⁻ᵀ + F⁻¹·T).
SymTensor sigma_from_cauchy(const Tensor3& F, const SymTensor& T);

/// |ρ/ρ_R − (1 − tr ε)|.
double density_linearization_gap(const DeformationState& state);

}  // namespace strainlim
