#pragma once

// Fixed-point solves of E = f_δ(E, S̄) (and H = f_δ(H, T), which is the same
// equation with the Hencky strain and Cauchy stress in the two slots).

#include <optional>
#include <string>

#include "strainlim/errors.hpp"
#include "strainlim/families.hpp"

namespace strainlim {

/// `enforce` rejects any iterate or input outside U_δ × V with OutOfDomain.
/// `report` evaluates the closed-form response wherever it is defined and
/// records domain membership in the report instead.
enum class DomainPolicy { enforce, report };

std::string to_string(DomainPolicy policy);
DomainPolicy domain_policy_from_string(const std::string& name);

enum class SolveMethod { picard, newton };

std::string to_string(SolveMethod method);

struct SolveOptions {
  DomainPolicy domain = DomainPolicy::enforce;
  int picard_iterations = 20;
  int max_iterations = 200;
  /// Switch to Newton once |r_{k+1}| / |r_k| exceeds this.
  double stall_ratio = 0.9;
  int max_halvings = 30;
  /// Defaults to 1e-13·max(1, δ).
  std::optional<double> tol_abs;
};

struct SolveReport {
  SymTensor solution;
  int iterations = 0;
  double residual = 0.0;
  SolveMethod method = SolveMethod::picard;
  bool interior_ball_ok = false;
  bool in_domain = false;
};

/// Thrown with code NoConvergence; carries the best iterate seen.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, SymTensor best, double bestResidual)
      : Error(ErrorCode::NoConvergence, what), best_(best), best_residual_(bestResidual) {}

  [[nodiscard]] const SymTensor& best() const noexcept { return best_; }
  [[nodiscard]] double best_residual() const noexcept { return best_residual_; }

 private:
  SymTensor best_;
  double best_residual_;
};

double default_tolerance(double delta);

SolveReport solve_implicit(const FamilySpec& spec, double delta, const SymTensor& Sbar,
                           const std::optional<SymTensor>& guess = std::nullopt, const SolveOptions& options = {});

SolveReport solve_implicit_hencky(const FamilySpec& spec, double delta, const SymTensor& T,
                                  const std::optional<SymTensor>& guess = std::nullopt,
                                  const SolveOptions& options = {});

/// Evaluate f_δ under a domain policy.
SymTensor evaluate(const FamilySpec& spec, double delta, const SymTensor& E, const SymTensor& Sbar,
                   DomainPolicy policy);

}  // namespace strainlim
