#include "strainlim/scalar1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "strainlim/analysis.hpp"
#include "strainlim/errors.hpp"

namespace strainlim {

void Scalar1DParams::validate() const {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "a must be positive");
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be at least 1");
  if (!(delta > 0.0 && delta <= 0.1)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 0.1]");
}

double oned_forward(const Scalar1DParams& params, double Sbar) {
  const double x = std::abs(params.a * Sbar);
  // (1 + xᵖ)^{-1/p}·S̄, written to stay finite for huge x.
  const double factor = x <= 1.0 ? std::pow(1.0 + std::pow(x, params.p), -1.0 / params.p)
                                 : std::pow(1.0 + std::pow(x, -params.p), -1.0 / params.p) / x;
  return params.delta * params.a * factor * Sbar;
}

double oned_strain(double E) {
  if (!(E > -0.5)) throw Error(ErrorCode::DomainError, "oned_strain needs E > -1/2, got " + std::to_string(E));
  // (1+2E)^{1/2} − 1 without cancellation.
  return 2.0 * E / (std::sqrt(1.0 + 2.0 * E) + 1.0);
}

double oned_invert(const Scalar1DParams& params, double E) {
  const double t = E / params.delta;
  const double at = std::abs(t);
  if (!(at < 1.0)) throw Error(ErrorCode::Saturation, "|E/δ| = " + std::to_string(at) + " reaches the strain limit");
  // 1 − |t|ᵖ = −expm1(p·log|t|) keeps accuracy near the limit.
  const double oneMinus = at == 0.0 ? 1.0 : -std::expm1(params.p * std::log(at));
  return std::pow(oneMinus, -1.0 / params.p) * t / params.a;
}

OneDStudy oned_delta0_study(const Scalar1DParams& params, std::span<const double> Sbar) {
  params.validate();
  OneDStudy study;
  std::vector<double> d0;
  std::vector<double> gaps;
  for (double s : Sbar) {
    if (!std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "non-finite stress in 1D study");
    OneDRow row;
    row.Sbar = s;
    row.E = oned_forward(params, s);
    row.eps = oned_strain(row.E);
    row.delta0 = std::abs(row.eps);
    row.sigma = row.eps / (params.a * params.delta);
    row.gap = std::abs(row.sigma - s);
    if (row.delta0 > 0.0 && s != 0.0) {
      study.max_linear_ratio =
          std::max(study.max_linear_ratio, row.gap * params.delta / (std::abs(s) * row.delta0));
      study.max_quadratic_ratio = std::max(
          study.max_quadratic_ratio, row.gap * params.a * params.delta * params.delta / (row.delta0 * row.delta0));
    }
    if (row.gap > 0.0 && row.delta0 > 0.0) {
      d0.push_back(row.delta0);
      gaps.push_back(row.gap);
    }
    study.rows.push_back(row);
  }
  if (d0.size() >= 2) study.gap_slope = least_squares_slope(d0, gaps);
  return study;
}

}  // namespace strainlim
