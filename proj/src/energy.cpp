#include "strainlim/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "strainlim/errors.hpp"

namespace strainlim {

namespace {

constexpr double kQuadratureTol = 1e-12;
constexpr double kGradientStep = 1e-5;
constexpr double kInverseTol = 1e-15;

bool closed_form(const FamilySpec& f) { return f.kind == FamilyKind::power_law && f.p == 2.0; }

// Gradient of a scalar function of a symmetric tensor. The xy coordinate moves
// both A₁₂ and A₂₁, so its partial derivative is twice the tensor component.
template <class Fn>
SymTensor central_gradient(Fn&& fn, const SymTensor& at, double h) {
  SymTensor g;
  for (std::size_t i = 0; i < SymTensor::kSize; ++i) {
    SymTensor plus = at;
    SymTensor minus = at;
    plus[i] += h;
    minus[i] -= h;
    const double d = (fn(plus) - fn(minus)) / (2.0 * h);
    g[i] = i < 3 ? d : 0.5 * d;
  }
  return g;
}

void require_stress(const EnergyProfile& profile, const SymTensor& S) {
  if (!(frobenius(S) < profile.stress_radius)) {
    throw Error(ErrorCode::OutOfDomain, "|S| = " + std::to_string(frobenius(S)) + " outside the energy domain");
  }
}

// Newton on f₁(S̄) = Ẽ with a central-difference Jacobian.
SymTensor newton_inverse(const FamilySpec& f, const SymTensor& Et) {
  const auto residual = [&](const SymTensor& S) { return family_leading_unchecked(f, SymTensor::zero(), S) - Et; };
  SymTensor S = SymTensor::zero();
  SymTensor r = residual(S);
  double rn = frobenius(r);
  const double tol = kInverseTol * std::max(1.0, frobenius(Et));
  for (int it = 0; it < 100 && rn > tol; ++it) {
    const double h = 1e-7 * std::max(1.0, frobenius(S));
    std::array<std::array<double, 7>, 6> m{};
    for (std::size_t col = 0; col < 6; ++col) {
      SymTensor plus = S;
      SymTensor minus = S;
      plus[col] += h;
      minus[col] -= h;
      const SymTensor d = (residual(plus) - residual(minus)) / (2.0 * h);
      for (std::size_t row = 0; row < 6; ++row) m[row][col] = d[row];
    }
    for (std::size_t row = 0; row < 6; ++row) m[row][6] = -r[row];
    for (std::size_t col = 0; col < 6; ++col) {
      std::size_t piv = col;
      for (std::size_t row = col + 1; row < 6; ++row)
        if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
      if (!(std::abs(m[piv][col]) > 1e-300)) throw Error(ErrorCode::Saturation, "f₁ is not invertible here");
      std::swap(m[piv], m[col]);
      for (std::size_t row = col + 1; row < 6; ++row) {
        const double k = m[row][col] / m[col][col];
        for (std::size_t j = col; j < 7; ++j) m[row][j] -= k * m[col][j];
      }
    }
    SymTensor step;
    for (std::size_t i = 6; i-- > 0;) {
      double s = m[i][6];
      for (std::size_t j = i + 1; j < 6; ++j) s -= m[i][j] * step[j];
      step[i] = s / m[i][i];
    }
    double lambda = 1.0;
    bool accepted = false;
    for (int h2 = 0; h2 < 40; ++h2, lambda *= 0.5) {
      const SymTensor trial = S + lambda * step;
      const SymTensor rt = residual(trial);
      if (frobenius(rt) < rn) {
        S = trial;
        r = rt;
        rn = frobenius(rt);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(rn <= 1e3 * tol)) {
    throw Error(ErrorCode::Saturation, "no stress reaches Ẽ; residual " + std::to_string(rn));
  }
  return S;
}

}  // namespace

void EnergyProfile::validate() const {
  if (quadrature_points < 64) throw Error(ErrorCode::InvalidArgument, "quadrature_points must be at least 64");
  if (!(stress_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "stress_radius must be positive");
  family.validate();
  if (family.kind == FamilyKind::power_law) return;
  if (family.kind == FamilyKind::scaled_base && family.base.stress_only && family.base.potential) return;
  throw Error(ErrorCode::InvalidArgument, "energy needs power_law or a scaled_base with a gradient base");
}

double radial_potential_quadrature(double a, double p, double s, int quadrature_points) {
  if (s == 0.0) return 0.0;
  const auto integrand = [a, p](double t) {
    const double x = a * t;
    return x <= 1.0 ? a * t * std::pow(1.0 + std::pow(x, p), -1.0 / p)
                    : std::pow(1.0 + std::pow(x, -p), -1.0 / p);
  };
  double err = 0.0;
  const double g = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, s, 15,
                                                                                  kQuadratureTol, &err);
  if (err <= kQuadratureTol * std::max(1.0, std::abs(g))) return g;
  // Fallback: fixed panels of 8-point Gauss rules, at least quadrature_points nodes.
  const int panels = std::max(8, quadrature_points / 8);
  const double w = s / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    sum += boost::math::quadrature::gauss<double, 8>::integrate(integrand, k * w, (k + 1) * w);
  }
  return sum;
}

double complementary_energy(const EnergyProfile& profile, const SymTensor& Sbar) {
  profile.validate();
  require_stress(profile, Sbar);
  const FamilySpec& f = profile.family;
  if (f.kind == FamilyKind::scaled_base) return f.base.potential(Sbar);
  const double s = frobenius(Sbar);
  if (closed_form(f)) {
    const double x = f.a * s;
    return x * x / (std::sqrt(1.0 + x * x) + 1.0) / f.a;
  }
  return radial_potential_quadrature(f.a, f.p, s, profile.quadrature_points);
}

SymTensor leading_inverse(const EnergyProfile& profile, const SymTensor& Etilde) {
  profile.validate();
  const FamilySpec& f = profile.family;
  if (f.kind == FamilyKind::power_law) {
    const double e = frobenius(Etilde);
    if (!(e < 1.0)) throw Error(ErrorCode::Saturation, "|Ẽ| = " + std::to_string(e) + " reaches the strain limit");
    const double oneMinus = e == 0.0 ? 1.0 : -std::expm1(f.p * std::log(e));
    return (std::pow(oneMinus, -1.0 / f.p) / f.a) * Etilde;
  }
  return newton_inverse(f, Etilde);
}

double legendre_transform(const EnergyProfile& profile, const SymTensor& Etilde) {
  const SymTensor S = leading_inverse(profile, Etilde);
  return dot(Etilde, S) - complementary_energy(profile, S);
}

SymTensor green_stress(const EnergyProfile& profile, double delta, const SymTensor& eps) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const SymTensor Et = eps / delta;
  // δW(ε/δ) differentiated in ε equals ∇W at Ẽ, so difference W directly.
  const double h = kGradientStep * std::max(1.0, frobenius(Et));
  if (profile.family.kind == FamilyKind::power_law && !(frobenius(Et) + h < 1.0)) {
    throw Error(ErrorCode::Saturation, "|ε/δ| too close to the strain limit");
  }
  return central_gradient([&](const SymTensor& E) { return legendre_transform(profile, E); }, Et, h);
}

SymTensor complementary_energy_gradient(const EnergyProfile& profile, const SymTensor& Sbar) {
  const double h = kGradientStep * std::max(1.0, frobenius(Sbar));
  return central_gradient([&](const SymTensor& S) { return complementary_energy(profile, S); }, Sbar, h);
}

}  // namespace strainlim
