#include "strainlim/kinematics.hpp"

#include <cmath>
#include <string>

#include "strainlim/errors.hpp"

namespace strainlim {

namespace {

constexpr double kAxisTol = 1e-8;

void require_rotation(const Tensor3& R) {
  const double orth = frobenius(transpose_mult(R) - Tensor3::identity());
  if (!(orth <= 1e-10) || !(det(R) > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "expected a proper rotation, |RᵀR − I| = " + std::to_string(orth));
  }
}

}  // namespace

double rotation_bound(const RotationSpec& spec, double delta) {
  const double t = kSkewNorm * spec.magnitude_coefficient * delta;
  return t * std::exp(t);
}

double DeformationState::displacement_gradient_norm() const { return frobenius(F - Tensor3::identity()); }

SymTensor green_strain(const Tensor3& F) {
  return 0.5 * (SymTensor::sym(transpose_mult(F)) - SymTensor::identity());
}

SymTensor linearized_strain(const Tensor3& F) { return SymTensor::sym(F) - SymTensor::identity(); }

SymTensor hencky_strain(const Tensor3& F) { return 0.5 * sym_log(SymTensor::sym(outer_mult_transpose(F))); }

DeformationState state_from_gradient(const Tensor3& F) {
  DeformationState s;
  s.F = F;
  s.C = SymTensor::sym(transpose_mult(F));
  s.B = SymTensor::sym(outer_mult_transpose(F));
  s.E = 0.5 * (s.C - SymTensor::identity());
  s.eps = linearized_strain(F);
  s.H = 0.5 * sym_log(s.B);
  const double j = det(F);
  if (!(j > 0.0)) throw Error(ErrorCode::Singular, "deformation gradient with det F = " + std::to_string(j));
  s.density_ratio = 1.0 / j;
  return s;
}

Tensor3 make_rotation(const RotationSpec& spec, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "make_rotation: delta must be positive");
  const auto& w = spec.axis;
  const double n = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
  if (!(std::abs(n - 1.0) <= kAxisTol)) {
    throw Error(ErrorCode::InvalidAxis, "rotation axis has norm " + std::to_string(n));
  }
  const double angle = delta * spec.magnitude_coefficient;
  const Tensor3 K({0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0});
  // 1 − cos θ = 2 sin²(θ/2) keeps the small-angle term accurate.
  const double half = std::sin(0.5 * angle);
  return Tensor3::identity() + std::sin(angle) * K + (2.0 * half * half) * (K * K);
}

DeformationState deformation_from_green(const SymTensor& E, const Tensor3& R) {
  require_rotation(R);
  const SymTensor U = spd_sqrt(SymTensor::identity() + 2.0 * E);
  return state_from_gradient(R * U.full());
}

DeformationState deformation_from_hencky(const SymTensor& H, const Tensor3& R) {
  require_rotation(R);
  return state_from_gradient(sym_exp(H).full() * R);
}

SymTensor sigma_from_piola(const Tensor3& F, const SymTensor& Sbar) {
  const Tensor3 FS = F * Sbar.full();
  // F·S̄ + S̄·Fᵀ = FS + (FS)ᵀ, so the result is sym(FS).
  return SymTensor::sym(FS);
}

SymTensor sigma_from_cauchy(const Tensor3& F, const SymTensor& T) {
  const double j = det(F);
  const Tensor3 FinvT = inverse(F) * T.full();
  // T·F⁻ᵀ = (F⁻¹·T)ᵀ, so the bracket is 2·sym(F⁻¹T).
  return j * SymTensor::sym(FinvT);
}

double density_linearization_gap(const DeformationState& state) {
  return std::abs(state.density_ratio - (1.0 - trace(state.eps)));
}

}  // namespace strainlim
