#include "strainlim/symtensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strainlim/errors.hpp"

namespace strainlim {

namespace {

// Component index of (i, j) inside the (xx, yy, zz, xy, xz, yz) layout.
constexpr std::array<std::array<std::size_t, 3>, 3> kSymIndex{{{0, 3, 4}, {3, 1, 5}, {4, 5, 2}}};

constexpr int kMaxJacobiSweeps = 50;
constexpr double kJacobiRelTol = 1e-14;

}  // namespace

// ---------------------------------------------------------------------------
// Tensor3

Tensor3 Tensor3::transpose() const {
  Tensor3 t;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
  return t;
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  for (std::size_t k = 0; k < 9; ++k) m_[k] += o.m_[k];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
  for (std::size_t k = 0; k < 9; ++k) m_[k] -= o.m_[k];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  for (double& v : m_) v *= s;
  return *this;
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

Tensor3 operator*(const Tensor3& a, const Tensor3& b) {
  Tensor3 c;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return c;
}

// ---------------------------------------------------------------------------
// SymTensor

SymTensor SymTensor::sym(const Tensor3& a) {
  return {a(0, 0),
          a(1, 1),
          a(2, 2),
          0.5 * (a(0, 1) + a(1, 0)),
          0.5 * (a(0, 2) + a(2, 0)),
          0.5 * (a(1, 2) + a(2, 1))};
}

double SymTensor::operator()(std::size_t i, std::size_t j) const { return c_[kSymIndex[i][j]]; }

Tensor3 SymTensor::full() const {
  return Tensor3({xx(), xy(), xz(), xy(), yy(), yz(), xz(), yz(), zz()});
}

SymTensor& SymTensor::operator+=(const SymTensor& o) {
  for (std::size_t k = 0; k < kSize; ++k) c_[k] += o.c_[k];
  return *this;
}

SymTensor& SymTensor::operator-=(const SymTensor& o) {
  for (std::size_t k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
  return *this;
}

SymTensor& SymTensor::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

SymTensor& SymTensor::operator/=(double s) {
  for (double& v : c_) v /= s;
  return *this;
}

SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
SymTensor operator-(SymTensor a) { return a *= -1.0; }
SymTensor operator*(SymTensor a, double s) { return a *= s; }
SymTensor operator*(double s, SymTensor a) { return a *= s; }
SymTensor operator/(SymTensor a, double s) { return a /= s; }

// ---------------------------------------------------------------------------
// Scalar functions

double frobenius(const SymTensor& a) {
  const double diag = a.xx() * a.xx() + a.yy() * a.yy() + a.zz() * a.zz();
  const double off = a.xy() * a.xy() + a.xz() * a.xz() + a.yz() * a.yz();
  return std::sqrt(diag + 2.0 * off);
}

double frobenius(const Tensor3& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double trace(const SymTensor& a) { return a.xx() + a.yy() + a.zz(); }
double trace(const Tensor3& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

double det(const Tensor3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

double det(const SymTensor& a) { return det(a.full()); }

double dot(const SymTensor& a, const SymTensor& b) {
  return a.xx() * b.xx() + a.yy() * b.yy() + a.zz() * b.zz() +
         2.0 * (a.xy() * b.xy() + a.xz() * b.xz() + a.yz() * b.yz());
}

// ---------------------------------------------------------------------------
// Spectral decomposition

Spectrum eig_sym(const SymTensor& a) {
  // Rotations are accumulated in extended precision; the log/exp round trip
  // on spectra spanning 10⁶ is otherwise at the edge of double accuracy.
  using Real = long double;
  Real m[3][3];
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = a(i, j);
  Real v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  const Real scale = frobenius(a);
  auto offNorm = [&] { return std::sqrt(2.0L * (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2])); };

  // Sweep until the off-diagonal mass is below tolerance, then once more:
  // convergence is quadratic, so the extra sweep clears what the tolerance
  // would otherwise leave in the eigenvectors.
  bool polished = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !polished; ++sweep) {
    polished = offNorm() <= kJacobiRelTol * scale;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        const Real apq = m[p][q];
        if (apq == 0.0L) continue;
        const Real theta = (m[q][q] - m[p][p]) / (2.0L * apq);
        const Real t = std::copysign(1.0L, theta) / (std::abs(theta) + std::hypot(theta, 1.0L));
        const Real c = 1.0L / std::sqrt(t * t + 1.0L);
        const Real s = t * c;
        const Real tau = s / (1.0L + c);

        m[p][p] -= t * apq;
        m[q][q] += t * apq;
        m[p][q] = m[q][p] = 0.0L;
        for (int r = 0; r < 3; ++r) {
          if (r == p || r == q) continue;
          const Real arp = m[r][p];
          const Real arq = m[r][q];
          m[r][p] = m[p][r] = arp - s * (arq + tau * arp);
          m[r][q] = m[q][r] = arq + s * (arp - tau * arq);
        }
        for (int r = 0; r < 3; ++r) {
          const Real vrp = v[r][p];
          const Real vrq = v[r][q];
          v[r][p] = vrp - s * (vrq + tau * vrp);
          v[r][q] = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return m[i][i] > m[j][j]; });

  Spectrum out;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t src = order[k];
    out.values[k] = static_cast<double>(m[src][src]);
    std::size_t big = 0;
    for (std::size_t r = 1; r < 3; ++r)
      if (std::abs(v[r][src]) > std::abs(v[big][src])) big = r;
    const Real sign = v[big][src] < 0.0L ? -1.0L : 1.0L;
    for (std::size_t r = 0; r < 3; ++r) out.frame(r, k) = static_cast<double>(sign * v[r][src]);
  }
  return out;
}

namespace {

Spectrum positive_spectrum(const SymTensor& c, const char* what) {
  Spectrum s = eig_sym(c);
  if (s.values[2] <= kPositivityTol) {
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(what) + ": smallest eigenvalue " + std::to_string(s.values[2]) + " is not positive");
  }
  return s;
}

}  // namespace

SymTensor spd_sqrt(const SymTensor& c) {
  return spectral_apply(positive_spectrum(c, "spd_sqrt"), [](double l) { return std::sqrt(l); });
}

SymTensor sym_log(const SymTensor& b) {
  return spectral_apply(positive_spectrum(b, "sym_log"), [](double l) { return std::log(l); });
}

SymTensor sym_exp(const SymTensor& h) {
  return spectral_apply(eig_sym(h), [](double l) { return std::exp(l); });
}

// ---------------------------------------------------------------------------
// Inverses

Tensor3 inverse(const Tensor3& a) {
  const double d = det(a);
  if (!(std::abs(d) > kSingularTol)) {
    throw Error(ErrorCode::Singular, "inverse: |det| = " + std::to_string(std::abs(d)));
  }
  Tensor3 inv;
  inv(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  inv(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  inv(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  inv(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  inv(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  inv(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  inv(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  inv(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  inv(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return inv * (1.0 / d);
}

SymTensor inverse(const SymTensor& a) { return SymTensor::sym(inverse(a.full())); }

SymTensor congruence(const Tensor3& q, const SymTensor& a) { return SymTensor::sym(q * a.full() * q.transpose()); }

Tensor3 outer_mult_transpose(const Tensor3& a) { return a * a.transpose(); }

Tensor3 transpose_mult(const Tensor3& a) { return a.transpose() * a; }

}  // namespace strainlim
