#include "strainlim/families.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "strainlim/errors.hpp"

namespace strainlim {

namespace {

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool is_density(FamilyKind k) {
  return k == FamilyKind::density_modulus_reciprocal || k == FamilyKind::density_modulus_direct;
}

// a(1 + aᵖ|S|ᵖ)^{-1/p}·S, arranged so that large a|S| cannot overflow.
SymTensor power_law_profile(double a, double p, const SymTensor& S) {
  const double x = a * frobenius(S);
  double factor;
  if (x <= 1.0) {
    factor = std::pow(1.0 + std::pow(x, p), -1.0 / p);
  } else {
    factor = std::pow(1.0 + std::pow(x, -p), -1.0 / p) / x;
  }
  return (a * factor) * S;
}

// (1+ν)S̄ − ν tr(S̄) I
SymTensor isotropic_compliance_numerator(double nu, const SymTensor& S) {
  return (1.0 + nu) * S - (nu * trace(S)) * SymTensor::identity();
}

// log det(I + 2E), via log1p of the invariant expansion so that
// small strains keep full relative accuracy. Throws if I + 2E is not SPD.
double log_det_stretch(const SymTensor& E) {
  const SymTensor C = SymTensor::identity() + 2.0 * E;
  // Sylvester's criterion on the leading principal minors.
  const double m1 = C.xx();
  const double m2 = C.xx() * C.yy() - C.xy() * C.xy();
  const double m3 = det(C);
  if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "I + 2E is not positive definite");
  }
  const double tr = trace(E);
  const double trSq = dot(E, E);
  const double i2 = 0.5 * (tr * tr - trSq);
  const double q = 2.0 * tr + 4.0 * i2 + 8.0 * det(E);
  return std::log1p(q);
}

void require_delta(const FamilySpec& spec, double delta) {
  const double ceiling = admissible_delta(spec);
  if (!(delta > 0.0) || !(delta <= ceiling)) {
    throw Error(ErrorCode::InadmissibleDelta,
                "delta = " + describe(delta) + " outside (0, " + describe(ceiling) + "] for " + to_string(spec.kind));
  }
}

void require_domain(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& S) {
  const DomainSpec dom = domain(spec, delta);
  if (!dom.contains_strain(E)) {
    throw Error(ErrorCode::OutOfDomain,
                "|E| = " + describe(frobenius(E)) + " not below strain radius " + describe(dom.strain_radius));
  }
  if (!dom.contains_stress(S)) {
    throw Error(ErrorCode::OutOfDomain,
                "|S| = " + describe(frobenius(S)) + " not below stress radius " + describe(dom.stress_radius));
  }
}

// Bracket of the generalized modulus; E_δ = δ⁻¹E₀·bracket (reciprocal) or
// δ⁻¹E₀/bracket (direct).
double modulus_bracket(const FamilySpec& spec, double delta, const SymTensor& E) {
  const double logDet = log_det_stretch(E);
  const double sign = spec.kind == FamilyKind::density_modulus_reciprocal ? -0.5 : 0.5;
  return 1.0 + spec.a / delta * std::expm1(sign * logDet);
}

double modulus_from_bracket(const FamilySpec& spec, double delta, double bracket) {
  return spec.kind == FamilyKind::density_modulus_reciprocal ? spec.E0 / delta * bracket
                                                             : spec.E0 / delta / bracket;
}

SymTensor eval_formula(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& S) {
  switch (spec.kind) {
    case FamilyKind::power_law:
      return delta * power_law_profile(spec.a, spec.p, S);
    case FamilyKind::density_modulus_reciprocal:
    case FamilyKind::density_modulus_direct: {
      const double bracket = modulus_bracket(spec, delta, E);
      if (!(bracket > 0.0)) {
        throw Error(ErrorCode::NonpositiveModulus, "modulus bracket " + describe(bracket) + " is not positive");
      }
      // N/E_δ arranged as δ·(profile) so that E = 0 reproduces δ·f₁ exactly.
      const SymTensor N = isotropic_compliance_numerator(spec.nu, S);
      if (spec.kind == FamilyKind::density_modulus_reciprocal) return delta * (N / (spec.E0 * bracket));
      return delta * (N * (bracket / spec.E0));
    }
    case FamilyKind::scaled_base: {
      if (!spec.base.response) throw Error(ErrorCode::InvalidArgument, "scaled_base family without a base response");
      const double ratio = delta / spec.delta1;
      return ratio * spec.base.response(E / ratio, S);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family kind");
}

SymTensor leading_formula(const FamilySpec& spec, const SymTensor& Et, const SymTensor& S) {
  switch (spec.kind) {
    case FamilyKind::power_law:
      return power_law_profile(spec.a, spec.p, S);
    case FamilyKind::density_modulus_reciprocal: {
      const double denom = 1.0 - spec.a * trace(Et);
      if (!(denom > 0.0)) {
        throw Error(ErrorCode::SingularLeading, "1 − a tr Ẽ = " + describe(denom) + " is not positive");
      }
      return isotropic_compliance_numerator(spec.nu, S) / (spec.E0 * denom);
    }
    case FamilyKind::density_modulus_direct:
      return isotropic_compliance_numerator(spec.nu, S) * ((1.0 + spec.a * trace(Et)) / spec.E0);
    case FamilyKind::scaled_base:
      if (!spec.base.response) throw Error(ErrorCode::InvalidArgument, "scaled_base family without a base response");
      return spec.base.response(spec.delta1 * Et, S) / spec.delta1;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family kind");
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::scaled_base: return "scaled_base";
    case FamilyKind::power_law: return "power_law";
    case FamilyKind::density_modulus_reciprocal: return "density_modulus_reciprocal";
    case FamilyKind::density_modulus_direct: return "density_modulus_direct";
  }
  return "unknown";
}

FamilyKind family_kind_from_string(const std::string& name) {
  for (FamilyKind k : {FamilyKind::scaled_base, FamilyKind::power_law, FamilyKind::density_modulus_reciprocal,
                       FamilyKind::density_modulus_direct}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family kind '" + name + "'");
}

BaseProfile builtin_base(const std::string& name, double a, double p, double E0, double nu, double delta1) {
  BaseProfile base;
  base.name = name;
  if (name == "zero") {
    base.response = [](const SymTensor&, const SymTensor&) { return SymTensor::zero(); };
    base.potential = [](const SymTensor&) { return 0.0; };
    base.stress_only = true;
  } else if (name == "power_law") {
    base.response = [a, p, delta1](const SymTensor&, const SymTensor& S) {
      return delta1 * power_law_profile(a, p, S);
    };
    if (p == 2.0) {
      base.potential = [a](const SymTensor& S) {
        const double x = a * frobenius(S);
        return x * x / (std::sqrt(1.0 + x * x) + 1.0) / a;  // a⁻¹(√(1+x²) − 1)
      };
    }
    base.stress_only = true;
  } else if (name == "density_modulus_reciprocal") {
    FamilySpec inner = FamilySpec::density_reciprocal(E0, nu, a, 0.5, 1.0);
    base.response = [inner, delta1](const SymTensor& E, const SymTensor& S) {
      const double bracket = modulus_bracket(inner, delta1, E);
      if (!(bracket > 0.0)) throw Error(ErrorCode::NonpositiveModulus, "base modulus bracket is not positive");
      return isotropic_compliance_numerator(inner.nu, S) / modulus_from_bracket(inner, delta1, bracket);
    };
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown built-in base '" + name + "'");
  }
  return base;
}

void FamilySpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (!(a > 0.0)) fail("a must be positive");
  if (!(p >= 1.0)) fail("p must be at least 1");
  if (!(E0 > 0.0)) fail("E0 must be positive");
  if (!(nu >= 0.0 && nu < 0.5)) fail("nu must lie in [0, 1/2)");
  if (!(b > 0.0)) fail("b must be positive");
  if (!(c > 0.0)) fail("c must be positive");
  if (!(delta1 > 0.0)) fail("delta1 must be positive");
  if (is_density(kind) && !(a * b < 0.5)) fail("density families require a·b < 1/2");
  if (delta_max && !(*delta_max > 0.0)) fail("delta_max must be positive");
  if (kind == FamilyKind::scaled_base && !base.response) fail("scaled_base requires a base response");
}

FamilySpec& FamilySpec::bind_base() {
  if (kind == FamilyKind::scaled_base && !base.response) base = builtin_base(base_name, a, p, E0, nu, delta1);
  return *this;
}

FamilySpec FamilySpec::power_law(double a, double p) {
  FamilySpec s;
  s.kind = FamilyKind::power_law;
  s.a = a;
  s.p = p;
  return s;
}

FamilySpec FamilySpec::density_reciprocal(double E0, double nu, double a, double b, double c) {
  FamilySpec s;
  s.kind = FamilyKind::density_modulus_reciprocal;
  s.E0 = E0;
  s.nu = nu;
  s.a = a;
  s.b = b;
  s.c = c;
  return s;
}

FamilySpec FamilySpec::density_direct(double E0, double nu, double a, double b, double c) {
  FamilySpec s = density_reciprocal(E0, nu, a, b, c);
  s.kind = FamilyKind::density_modulus_direct;
  return s;
}

FamilySpec FamilySpec::scaled(BaseProfile base, double delta1, double b, double c) {
  FamilySpec s;
  s.kind = FamilyKind::scaled_base;
  s.base_name = base.name;
  s.base = std::move(base);
  s.delta1 = delta1;
  s.b = b;
  s.c = c;
  return s;
}

bool DomainSpec::contains_strain(const SymTensor& E) const { return frobenius(E) < strain_radius; }
bool DomainSpec::contains_stress(const SymTensor& S) const { return frobenius(S) < stress_radius; }

double admissible_delta(const FamilySpec& spec) {
  if (spec.delta_max) return *spec.delta_max;
  switch (spec.kind) {
    case FamilyKind::power_law: return 0.1;
    case FamilyKind::density_modulus_reciprocal:
    case FamilyKind::density_modulus_direct: return std::min(0.1, 1.0 / (100.0 * std::max(1.0, spec.a)));
    case FamilyKind::scaled_base: return std::min(0.1, spec.delta1 / (2.0 * spec.b));
  }
  return 0.0;
}

DomainSpec domain(const FamilySpec& spec, double delta) {
  DomainSpec d;
  d.stress_radius = spec.c;
  switch (spec.kind) {
    case FamilyKind::power_law: d.strain_radius = delta * (1.0 + kPowerLawStrainMargin); break;
    case FamilyKind::density_modulus_reciprocal:
    case FamilyKind::density_modulus_direct: d.strain_radius = spec.b * delta; break;
    case FamilyKind::scaled_base: d.strain_radius = spec.b * delta / spec.delta1; break;
  }
  d.strain_radius = std::min(d.strain_radius, 0.5);
  return d;
}

bool stress_only(const FamilySpec& spec) {
  return spec.kind == FamilyKind::power_law || (spec.kind == FamilyKind::scaled_base && spec.base.stress_only);
}

SymTensor family_eval(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& Sbar) {
  require_delta(spec, delta);
  require_domain(spec, delta, E, Sbar);
  return eval_formula(spec, delta, E, Sbar);
}

SymTensor family_eval_unchecked(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& Sbar) {
  require_delta(spec, delta);
  return eval_formula(spec, delta, E, Sbar);
}

double generalized_modulus(const FamilySpec& spec, double delta, const SymTensor& E) {
  if (!is_density(spec.kind)) {
    throw Error(ErrorCode::InvalidArgument, "generalized_modulus needs a density family, got " + to_string(spec.kind));
  }
  require_delta(spec, delta);
  const DomainSpec dom = domain(spec, delta);
  if (!dom.contains_strain(E)) throw Error(ErrorCode::OutOfDomain, "|E| = " + describe(frobenius(E)) + " not below bδ");
  const double bracket = modulus_bracket(spec, delta, E);
  if (!(bracket >= 1.0 - 2.0 * spec.a * spec.b)) {
    throw Error(ErrorCode::NonpositiveModulus, "modulus bracket " + describe(bracket) + " below 1 − 2ab");
  }
  return modulus_from_bracket(spec, delta, bracket);
}

SymTensor family_leading(const FamilySpec& spec, const SymTensor& Etilde, const SymTensor& Sbar) {
  // Rescaled domain U = U_δ/δ, independent of δ for every kind.
  const DomainSpec dom = domain(spec, 1.0);
  const double radius = spec.kind == FamilyKind::power_law ? 1.0 + kPowerLawStrainMargin
                        : spec.kind == FamilyKind::scaled_base ? spec.b / spec.delta1
                                                               : spec.b;
  if (!(frobenius(Etilde) < radius) || !dom.contains_stress(Sbar)) {
    throw Error(ErrorCode::OutOfDomain, "(Ẽ, S̄) outside the rescaled domain U × V");
  }
  return leading_formula(spec, Etilde, Sbar);
}

double leading_gap(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& Sbar) {
  const SymTensor full = family_eval(spec, delta, E, Sbar);
  return frobenius(full - delta * leading_formula(spec, E / delta, Sbar));
}

double density_bound_C0(const FamilySpec& s) { return (1.0 + 4.0 * s.nu) * s.c / (s.E0 * (1.0 - 2.0 * s.a * s.b)); }

double density_lipschitz_E(const FamilySpec& s) {
  const double q = 1.0 - 2.0 * s.a * s.b;
  return (1.0 + 4.0 * s.nu) * s.a * s.c * std::sqrt(2.0) / (s.E0 * q * q);
}

double density_lipschitz_S(const FamilySpec& s) { return (1.0 + 4.0 * s.nu) / (s.E0 * (1.0 - 2.0 * s.a * s.b)); }

SymTensor family_leading_unchecked(const FamilySpec& spec, const SymTensor& Etilde, const SymTensor& Sbar) {
  return leading_formula(spec, Etilde, Sbar);
}

}  // namespace strainlim
