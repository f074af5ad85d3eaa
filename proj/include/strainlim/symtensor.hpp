#pragma once

// Symmetric and general 3x3 tensors with the spectral machinery needed for
// stretch tensors: eigen-decomposition, SPD square root, logarithm, exponential.

#include <array>
#include <cstddef>

namespace strainlim {

class SymTensor;

/// General 3x3 tensor stored row-major. Houses F, R and displacement gradients.
class Tensor3 {
 public:
  constexpr Tensor3() = default;
  constexpr explicit Tensor3(const std::array<double, 9>& rowMajor) : m_(rowMajor) {}

  static constexpr Tensor3 identity() { return Tensor3({1, 0, 0, 0, 1, 0, 0, 0, 1}); }
  static Tensor3 diag(double a, double b, double c) { return Tensor3({a, 0, 0, 0, b, 0, 0, 0, c}); }

  [[nodiscard]] constexpr double operator()(std::size_t i, std::size_t j) const { return m_[3 * i + j]; }
  constexpr double& operator()(std::size_t i, std::size_t j) { return m_[3 * i + j]; }
  [[nodiscard]] constexpr const std::array<double, 9>& data() const { return m_; }

  [[nodiscard]] Tensor3 transpose() const;

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(double s);

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::array<double, 9> m_{};
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(Tensor3 a, double s);
Tensor3 operator*(double s, Tensor3 a);
Tensor3 operator*(const Tensor3& a, const Tensor3& b);

/// Symmetric 3x3 tensor stored as its six independent components in the
/// order (xx, yy, zz, xy, xz, yz). This is also the coordinate order used
/// whenever a SymTensor is treated as a vector in R^6.
class SymTensor {
 public:
  static constexpr std::size_t kSize = 6;

  constexpr SymTensor() = default;
  constexpr SymTensor(double xx, double yy, double zz, double xy, double xz, double yz)
      : c_{xx, yy, zz, xy, xz, yz} {}
  constexpr explicit SymTensor(const std::array<double, 6>& c) : c_(c) {}

  static constexpr SymTensor zero() { return {}; }
  static constexpr SymTensor identity() { return {1, 1, 1, 0, 0, 0}; }
  static constexpr SymTensor diag(double a, double b, double c) { return {a, b, c, 0, 0, 0}; }

  /// Symmetric part of a general tensor, ½(A + Aᵀ).
  static SymTensor sym(const Tensor3& a);

  [[nodiscard]] constexpr double xx() const { return c_[0]; }
  [[nodiscard]] constexpr double yy() const { return c_[1]; }
  [[nodiscard]] constexpr double zz() const { return c_[2]; }
  [[nodiscard]] constexpr double xy() const { return c_[3]; }
  [[nodiscard]] constexpr double xz() const { return c_[4]; }
  [[nodiscard]] constexpr double yz() const { return c_[5]; }

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const;

  [[nodiscard]] constexpr const std::array<double, 6>& components() const { return c_; }
  constexpr double& operator[](std::size_t k) { return c_[k]; }
  [[nodiscard]] constexpr double operator[](std::size_t k) const { return c_[k]; }

  [[nodiscard]] Tensor3 full() const;

  SymTensor& operator+=(const SymTensor& o);
  SymTensor& operator-=(const SymTensor& o);
  SymTensor& operator*=(double s);
  SymTensor& operator/=(double s);

  friend bool operator==(const SymTensor&, const SymTensor&) = default;

 private:
  std::array<double, 6> c_{};
};

SymTensor operator+(SymTensor a, const SymTensor& b);
SymTensor operator-(SymTensor a, const SymTensor& b);
SymTensor operator-(SymTensor a);
SymTensor operator*(SymTensor a, double s);
SymTensor operator*(double s, SymTensor a);
SymTensor operator/(SymTensor a, double s);

/// Eigen-decomposition of a symmetric tensor. `frame` holds unit eigenvectors
/// as columns, matching `values` (descending).
struct Spectrum {
  std::array<double, 3> values{};
  Tensor3 frame = Tensor3::identity();
};

double frobenius(const SymTensor& a);
double frobenius(const Tensor3& a);
double trace(const SymTensor& a);
double trace(const Tensor3& a);
double det(const SymTensor& a);
double det(const Tensor3& a);

/// Double contraction A : B = tr(A Bᵀ).
double dot(const SymTensor& a, const SymTensor& b);

/// Cyclic Jacobi iteration; eigenvalues descending, ties kept in original
/// index order, each eigenvector's largest-magnitude component made positive.
Spectrum eig_sym(const SymTensor& a);

/// Rebuild Q·diag(g(λ))·Qᵀ from a spectrum.
template <class Fn>
SymTensor spectral_apply(const Spectrum& s, Fn&& g);

SymTensor spd_sqrt(const SymTensor& c);
SymTensor sym_log(const SymTensor& b);
SymTensor sym_exp(const SymTensor& h);

SymTensor inverse(const SymTensor& a);
Tensor3 inverse(const Tensor3& a);

/// Qᵀ·A·Q style helpers used by tests and kinematics.
SymTensor congruence(const Tensor3& q, const SymTensor& a);  // Q A Qᵀ
Tensor3 outer_mult_transpose(const Tensor3& a);               // A Aᵀ
Tensor3 transpose_mult(const Tensor3& a);                     // Aᵀ A

// Positivity floor for eigenvalues of tensors that must be SPD.
inline constexpr double kPositivityTol = 1e-14;
// Singularity floor for |det| before inversion.
inline constexpr double kSingularTol = 1e-14;

template <class Fn>
SymTensor spectral_apply(const Spectrum& s, Fn&& g) {
  std::array<double, 3> gv{g(s.values[0]), g(s.values[1]), g(s.values[2])};
  const Tensor3& q = s.frame;
  auto entry = [&](std::size_t i, std::size_t j) {
    return q(i, 0) * gv[0] * q(j, 0) + q(i, 1) * gv[1] * q(j, 1) + q(i, 2) * gv[2] * q(j, 2);
  };
  return {entry(0, 0), entry(1, 1), entry(2, 2), entry(0, 1), entry(0, 2), entry(1, 2)};
}

}  // namespace strainlim
