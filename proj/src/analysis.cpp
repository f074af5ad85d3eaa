#include "strainlim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "strainlim/errors.hpp"

namespace strainlim {

namespace {

void validate_ladder(const FamilySpec& spec, std::span<const double> deltas) {
  if (deltas.size() < 4) {
    throw Error(ErrorCode::FitUnderdetermined, "a convergence study needs at least 4 delta values");
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || !(deltas[i] <= admissible_delta(spec))) {
      throw Error(ErrorCode::InadmissibleDelta, "delta " + std::to_string(deltas[i]) + " is not admissible");
    }
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "deltas must be strictly decreasing");
    }
  }
}

std::optional<double> fit_or_exact(std::span<const double> d, std::span<const double> r) {
  try {
    return fit_order(d, r);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AllZeroResiduals) return std::nullopt;
    throw;
  }
}

ConvergenceReport run_study(StrainMeasure measure, const FamilySpec& spec, const SymTensor& stress,
                            const RotationSpec& rot, std::span<const double> deltas, const ConvergenceOptions& opt) {
  validate_ladder(spec, deltas);
  const bool enforce = opt.domain == DomainPolicy::enforce;
  if (enforce && !domain(spec, deltas.front()).contains_stress(stress)) {
    throw Error(ErrorCode::OutOfDomain, "stress outside V");
  }
  SolveOptions solverOpt = opt.solver;
  solverOpt.domain = opt.domain;

  ConvergenceReport rep;
  rep.measure = measure;
  for (double delta : deltas) {
    ConvergenceRow row;
    row.delta = delta;
    try {
      const SolveReport sol = measure == StrainMeasure::green ? solve_implicit(spec, delta, stress, std::nullopt, solverOpt)
                                                              : solve_implicit_hencky(spec, delta, stress, std::nullopt, solverOpt);
      const Tensor3 R = make_rotation(rot, delta);
      const DeformationState st =
          measure == StrainMeasure::green ? deformation_from_green(sol.solution, R) : deformation_from_hencky(sol.solution, R);
      const SymTensor sigma =
          measure == StrainMeasure::green ? sigma_from_piola(st.F, stress) : sigma_from_cauchy(st.F, stress);
      const SymTensor& eps = st.eps;
      const DomainSpec dom = domain(spec, delta);

      row.solver_iterations = sol.iterations;
      row.solution_norm = frobenius(sol.solution);
      row.interior_ball_ok = sol.interior_ball_ok;
      row.in_domain = dom.contains_strain(eps) && dom.contains_stress(sigma);
      row.delta0 = st.displacement_gradient_norm();
      row.residual_full = frobenius(eps - evaluate(spec, delta, eps, sigma, opt.domain));
      const SymTensor leading = enforce ? family_leading(spec, eps / delta, sigma)
                                        : family_leading_unchecked(spec, eps / delta, sigma);
      row.residual_leading = frobenius(eps - delta * leading);
      row.stress_gap = frobenius(sigma - stress);
      row.strain_gap = frobenius(sol.solution - eps);
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.failure = e.what();
    }
    rep.records.push_back(std::move(row));
  }

  std::vector<double> d, full, lead, stressGap, strainGap;
  for (const auto& row : rep.records) {
    if (!row.ok) continue;
    d.push_back(row.delta);
    full.push_back(row.residual_full);
    lead.push_back(row.residual_leading);
    stressGap.push_back(row.stress_gap);
    strainGap.push_back(row.strain_gap);
  }
  if (d.size() < 4) {
    std::string first;
    for (const auto& row : rep.records)
      if (!row.ok) {
        first = row.failure;
        break;
      }
    throw Error(ErrorCode::FitUnderdetermined,
                "only " + std::to_string(d.size()) + " successful rows; first failure: " + first);
  }
  rep.fitted_order_full = fit_or_exact(d, full);
  rep.fitted_order_leading = fit_or_exact(d, lead);
  rep.fitted_order_stress = fit_or_exact(d, stressGap);
  rep.fitted_order_strain = fit_or_exact(d, strainGap);
  rep.richardson_full = richardson_orders(d, full);
  return rep;
}

SymTensor uniform_in_ball(std::mt19937_64& rng, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::array<double, 6> g{};
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& v : g) {
      v = normal(rng);
      n2 += v * v;
    }
  } while (!(n2 > 0.0));
  const double r = radius * std::pow(uniform(rng), 1.0 / 6.0) / std::sqrt(n2);
  // Off-diagonal components enter |A| twice, so scale them by 1/√2 to make
  // the map from R⁶ to Sym an isometry.
  constexpr double kInvSqrt2 = 0.70710678118654752;
  return {r * g[0], r * g[1], r * g[2], r * g[3] * kInvSqrt2, r * g[4] * kInvSqrt2, r * g[5] * kInvSqrt2};
}

SymTensor unit_direction(std::mt19937_64& rng) {
  SymTensor d;
  do {
    d = uniform_in_ball(rng, 1.0);
  } while (!(frobenius(d) > 1e-3));
  return d / frobenius(d);
}

}  // namespace

std::size_t ConvergenceReport::successful_rows() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.ok; }));
}

std::vector<double> default_delta_ladder() {
  std::vector<double> d;
  for (int k = 6; k <= 13; ++k) d.push_back(std::ldexp(1.0, -k));
  return d;
}

ConvergenceReport run_convergence(const FamilySpec& spec, const SymTensor& Sbar, const RotationSpec& rot,
                                  std::span<const double> deltas, const ConvergenceOptions& options) {
  return run_study(StrainMeasure::green, spec, Sbar, rot, deltas, options);
}

ConvergenceReport run_convergence_hencky(const FamilySpec& spec, const SymTensor& T, const RotationSpec& rot,
                                         std::span<const double> deltas, const ConvergenceOptions& options) {
  return run_study(StrainMeasure::hencky, spec, T, rot, deltas, options);
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::FitUnderdetermined, "slope fit needs two or more paired points");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "log-log fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::FitUnderdetermined, "abscissae are all equal");
  return sxy / sxx;
}

double fit_order(std::span<const double> deltas, std::span<const double> residuals) {
  if (deltas.size() != residuals.size()) throw Error(ErrorCode::InvalidArgument, "length mismatch in fit_order");
  if (deltas.size() < 4) throw Error(ErrorCode::FitUnderdetermined, "fit_order needs at least 4 entries");
  std::vector<double> d, r;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!std::isfinite(residuals[i]) || residuals[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "residuals must be finite and nonnegative");
    }
    if (residuals[i] == 0.0) continue;
    d.push_back(deltas[i]);
    r.push_back(residuals[i]);
  }
  if (r.empty()) throw Error(ErrorCode::AllZeroResiduals, "every residual is exactly zero");
  if (r.size() < 4) {
    throw Error(ErrorCode::FitUnderdetermined, "only " + std::to_string(r.size()) + " nonzero residuals");
  }
  return least_squares_slope(d, r);
}

std::vector<double> richardson_orders(std::span<const double> deltas, std::span<const double> residuals) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < deltas.size() && i + 1 < residuals.size(); ++i) {
    if (residuals[i] > 0.0 && residuals[i + 1] > 0.0) {
      out.push_back(std::log(residuals[i] / residuals[i + 1]) / std::log(deltas[i] / deltas[i + 1]));
    }
  }
  return out;
}

double green_gradient_bound(double C0, double C2, double delta) {
  return (std::sqrt(3.0 + 2.0 * std::sqrt(3.0) * C0 * delta) * C2 + C0 / std::sqrt(1.0 - 2.0 * C0 * delta)) * delta;
}

double hencky_gradient_bound(double C0, double C2, double delta) { return (C2 + C0) * std::exp(C0 * delta) * delta; }

std::vector<CertificateSample> certification_samples(const FamilySpec& spec, double delta, std::size_t index,
                                                     int samples, std::uint64_t seed) {
  const DomainSpec dom = domain(spec, delta);
  if (!std::isfinite(dom.stress_radius)) throw Error(ErrorCode::InvalidArgument, "certification needs a bounded V");
  const double hE = kProbeScale * dom.strain_radius;
  const double hS = kProbeScale * dom.stress_radius;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::vector<CertificateSample> out;
  out.reserve(static_cast<std::size_t>(std::max(samples, 0)));
  for (int i = 0; i < samples; ++i) {
    // Draw from the shrunken balls so every partner stays inside the domain.
    CertificateSample c;
    c.E = uniform_in_ball(rng, dom.strain_radius - hE);
    c.S = uniform_in_ball(rng, dom.stress_radius - hS);
    c.E2 = c.E + hE * unit_direction(rng);
    c.S2 = c.S + hS * unit_direction(rng);
    out.push_back(c);
  }
  return out;
}

CertificateReport certify_constants(const FamilySpec& spec, std::span<const double> deltas, int samples,
                                    std::uint64_t seed) {
  if (samples < 100) throw Error(ErrorCode::InvalidArgument, "certification needs at least 100 samples");
  if (deltas.empty()) throw Error(ErrorCode::InvalidArgument, "certification needs at least one delta");
  CertificateReport rep;
  rep.samples = samples;
  rep.seed = seed;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double delta = deltas[k];
    CertificateRow row;
    row.delta = delta;
    for (const CertificateSample& c : certification_samples(spec, delta, k, samples, seed)) {
      const SymTensor f = family_eval(spec, delta, c.E, c.S);
      row.C0_hat = std::max(row.C0_hat, frobenius(f) / delta);
      row.C1_hat = std::max(row.C1_hat, frobenius(family_eval(spec, delta, c.E2, c.S) - f) / frobenius(c.E2 - c.E));
      row.D0_hat =
          std::max(row.D0_hat, frobenius(family_eval(spec, delta, c.E, c.S2) - f) / (delta * frobenius(c.S2 - c.S)));
      row.C3_hat = std::max(row.C3_hat, leading_gap(spec, delta, c.E, c.S) / (delta * delta));
    }
    rep.C0_hat = std::max(rep.C0_hat, row.C0_hat);
    rep.C1_hat = std::max(rep.C1_hat, row.C1_hat);
    rep.D0_hat = std::max(rep.D0_hat, row.D0_hat);
    rep.C3_hat = std::max(rep.C3_hat, row.C3_hat);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace strainlim
