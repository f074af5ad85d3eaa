#include "strainlim/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace strainlim {

namespace {

using Vec6 = std::array<double, 6>;
using Mat6 = std::array<Vec6, 6>;

constexpr double kJacobianStep = 1e-7;

// Gaussian elimination with partial pivoting; returns false if singular.
bool solve_linear(Mat6 a, Vec6 rhs, Vec6& x) {
  for (std::size_t col = 0; col < 6; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 6; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (!(std::abs(a[pivot][col]) > 1e-300)) return false;
    std::swap(a[pivot], a[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < 6; ++r) {
      const double m = a[r][col] / a[col][col];
      if (m == 0.0) continue;
      for (std::size_t k = col; k < 6; ++k) a[r][k] -= m * a[col][k];
      rhs[r] -= m * rhs[col];
    }
  }
  for (std::size_t i = 6; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < 6; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class FixedPointProblem {
 public:
  FixedPointProblem(const FamilySpec& spec, double delta, const SymTensor& S, DomainPolicy policy)
      : spec_(spec), delta_(delta), S_(S), policy_(policy) {}

  [[nodiscard]] SymTensor map(const SymTensor& E) const { return evaluate(spec_, delta_, E, S_, policy_); }
  [[nodiscard]] SymTensor residual(const SymTensor& E) const { return E - map(E); }

  // Central-difference Jacobian of g(E) = E − f(E) in component coordinates.
  // Evaluated without domain checks so probes near ∂U_δ stay well-defined.
  [[nodiscard]] Mat6 jacobian(const SymTensor& E) const {
    const double h = kJacobianStep * std::max(1.0, frobenius(E));
    Mat6 j{};
    for (std::size_t col = 0; col < 6; ++col) {
      SymTensor plus = E;
      SymTensor minus = E;
      plus[col] += h;
      minus[col] -= h;
      const SymTensor gp = plus - family_eval_unchecked(spec_, delta_, plus, S_);
      const SymTensor gm = minus - family_eval_unchecked(spec_, delta_, minus, S_);
      for (std::size_t row = 0; row < 6; ++row) j[row][col] = (gp[row] - gm[row]) / (2.0 * h);
    }
    return j;
  }

 private:
  const FamilySpec& spec_;
  double delta_;
  SymTensor S_;
  DomainPolicy policy_;
};

bool recoverable(const Error& e) {
  return e.code() == ErrorCode::OutOfDomain || e.code() == ErrorCode::NotPositiveDefinite ||
         e.code() == ErrorCode::NonpositiveModulus;
}

SolveReport finish(const FamilySpec& spec, double delta, const SymTensor& S, const SymTensor& E, int iterations,
                   SolveMethod method, DomainPolicy policy) {
  SolveReport rep;
  rep.solution = E;
  rep.iterations = iterations;
  rep.method = method;
  // Independent re-check of the fixed point.
  rep.residual = frobenius(E - evaluate(spec, delta, E, S, policy));
  const DomainSpec dom = domain(spec, delta);
  rep.in_domain = dom.contains_strain(E) && dom.contains_stress(S);
  rep.interior_ball_ok = rep.in_domain && frobenius(E) + dom.interior_radius() < dom.strain_radius;
  return rep;
}

SolveReport solve(const FamilySpec& spec, double delta, const SymTensor& S, const std::optional<SymTensor>& guess,
                  const SolveOptions& opt) {
  const double tol = opt.tol_abs.value_or(default_tolerance(delta));
  if (opt.domain == DomainPolicy::enforce && !domain(spec, delta).contains_stress(S)) {
    throw Error(ErrorCode::OutOfDomain, "stress |S| = " + fmt(frobenius(S)) + " outside V");
  }
  const FixedPointProblem problem(spec, delta, S, opt.domain);

  SymTensor E = guess.value_or(SymTensor::zero());
  SymTensor best = E;
  double bestResidual = std::numeric_limits<double>::infinity();
  int iterations = 0;

  if (stress_only(spec)) {
    // f_δ ignores E: one Picard step lands on the fixed point.
    E = problem.map(E);
    return finish(spec, delta, S, E, 1, SolveMethod::picard, opt.domain);
  }

  // Picard phase.
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= opt.picard_iterations && iterations < opt.max_iterations; ++k) {
    SymTensor next;
    try {
      next = problem.map(E);
    } catch (const Error& e) {
      if (!recoverable(e)) throw;
      E = best;  // last iterate that evaluated cleanly
      break;
    }
    const double r = frobenius(next - E);
    if (r < bestResidual) {
      bestResidual = r;
      best = E;
    }
    if (r <= tol) return finish(spec, delta, S, E, iterations, SolveMethod::picard, opt.domain);
    if (k == opt.picard_iterations) break;
    if (r > opt.stall_ratio * previous) break;
    previous = r;
    E = next;
    ++iterations;
  }

  // Newton phase on g(E) = E − f_δ(E, S̄) with backtracking.
  SymTensor g = problem.residual(E);
  double r = frobenius(g);
  while (iterations < opt.max_iterations) {
    if (r <= tol) return finish(spec, delta, S, E, iterations, SolveMethod::newton, opt.domain);
    Vec6 rhs;
    for (std::size_t i = 0; i < 6; ++i) rhs[i] = -g[i];
    Vec6 step{};
    if (!solve_linear(problem.jacobian(E), rhs, step)) {
      throw NoConvergenceError("singular Newton Jacobian; best residual " + fmt(bestResidual), best, bestResidual);
    }
    const SymTensor direction{step};
    double lambda = 1.0;
    bool accepted = false;
    bool leftDomain = false;
    for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
      const SymTensor trial = E + lambda * direction;
      try {
        const SymTensor gTrial = problem.residual(trial);
        const double rTrial = frobenius(gTrial);
        if (rTrial < r) {
          E = trial;
          g = gTrial;
          r = rTrial;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (!recoverable(e)) throw;
        leftDomain = true;
      }
    }
    ++iterations;
    if (r < bestResidual) {
      bestResidual = r;
      best = E;
    }
    if (!accepted) {
      if (leftDomain) throw Error(ErrorCode::OutOfDomain, "Newton backtracking could not stay inside U_δ");
      if (r <= tol) break;
      throw NoConvergenceError("line search failed; best residual " + fmt(bestResidual), best, bestResidual);
    }
  }
  if (r <= tol) return finish(spec, delta, S, E, iterations, SolveMethod::newton, opt.domain);
  throw NoConvergenceError("no convergence after " + std::to_string(iterations) + " iterations; best residual " +
                               fmt(bestResidual),
                           best, bestResidual);
}

}  // namespace

std::string to_string(DomainPolicy policy) { return policy == DomainPolicy::enforce ? "enforce" : "report"; }

DomainPolicy domain_policy_from_string(const std::string& name) {
  if (name == "enforce") return DomainPolicy::enforce;
  if (name == "report") return DomainPolicy::report;
  throw Error(ErrorCode::InvalidArgument, "unknown domain policy '" + name + "'");
}

std::string to_string(SolveMethod method) { return method == SolveMethod::picard ? "picard" : "newton"; }

double default_tolerance(double delta) { return 1e-13 * std::max(1.0, delta); }

SymTensor evaluate(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& Sbar,
                   DomainPolicy policy) {
  return policy == DomainPolicy::enforce ? family_eval(spec, delta, E, Sbar)
                                         : family_eval_unchecked(spec, delta, E, Sbar);
}

SolveReport solve_implicit(const FamilySpec& spec, double delta, const SymTensor& Sbar,
                           const std::optional<SymTensor>& guess, const SolveOptions& options) {
  return solve(spec, delta, Sbar, guess, options);
}

SolveReport solve_implicit_hencky(const FamilySpec& spec, double delta, const SymTensor& T,
                                  const std::optional<SymTensor>& guess, const SolveOptions& options) {
  return solve(spec, delta, T, guess, options);
}

}  // namespace strainlim
