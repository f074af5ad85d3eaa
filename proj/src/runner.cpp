#include "strainlim/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "strainlim/analysis.hpp"
#include "strainlim/energy.hpp"
#include "strainlim/errors.hpp"
#include "strainlim/scalar1d.hpp"

namespace strainlim {

using nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

class Csv {
 public:
  explicit Csv(const std::string& header) { out_ << header << '\n'; }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  [[nodiscard]] std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const std::string& v) { return v; }
  std::ostringstream out_;
};

json or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json tensor_json(const SymTensor& t) {
  return json::array({t.xx(), t.yy(), t.zz(), t.xy(), t.xz(), t.yz()});
}

bool in_window(const std::optional<double>& v, double lo, double hi) { return v && *v >= lo && *v <= hi; }

std::string describe_window(const char* name, const std::optional<double>& v, double lo, double hi) {
  return std::string(name) + " " + (v ? format_double(*v) : std::string("undefined")) + " outside [" +
         format_double(lo) + ", " + format_double(hi) + "]";
}

Verdict do_solve(const ExperimentConfig& c, Csv& csv, json& report) {
  Verdict v;
  const SymTensor S = c.stress_tensor();
  SolveOptions opt;
  opt.domain = c.domain_policy;
  report["rows"] = json::array();
  for (double delta : c.deltas) {
    try {
      const SolveReport r = solve_implicit(c.family, delta, S, std::nullopt, opt);
      const SymTensor& E = r.solution;
      csv.row(delta, E.xx(), E.yy(), E.zz(), E.xy(), E.xz(), E.yz(), r.residual, r.iterations, to_string(r.method),
              r.in_domain, r.interior_ball_ok);
      report["rows"].push_back({{"delta", delta},
                                {"solution", tensor_json(E)},
                                {"residual", r.residual},
                                {"iterations", r.iterations},
                                {"method", to_string(r.method)},
                                {"in_domain", r.in_domain},
                                {"interior_ball_ok", r.interior_ball_ok}});
    } catch (const Error& e) {
      const double nan = std::nan("");
      csv.row(delta, nan, nan, nan, nan, nan, nan, nan, 0, std::string("failed"), false, false);
      report["rows"].push_back({{"delta", delta}, {"failure", e.what()}});
      v.fail("delta " + format_double(delta) + ": " + e.what());
    }
  }
  return v;
}

Verdict do_converge(const ExperimentConfig& c, Csv& csv, json& report) {
  Verdict v;
  const SymTensor S = c.stress_tensor();
  ConvergenceOptions opt;
  opt.domain = c.domain_policy;
  const ConvergenceReport rep = c.command == Command::converge
                                    ? run_convergence(c.family, S, c.rotation, c.deltas, opt)
                                    : run_convergence_hencky(c.family, S, c.rotation, c.deltas, opt);
  const Thresholds& t = c.thresholds;
  json rows = json::array();
  for (const auto& r : rep.records) {
    if (r.ok) {
      csv.row(r.delta, r.delta0, r.residual_full, r.residual_leading, r.stress_gap, r.strain_gap);
      if (!(r.stress_gap <= t.stress_gap_factor * r.delta * frobenius(S))) {
        v.fail("delta " + format_double(r.delta) + ": stress gap " + format_double(r.stress_gap) + " above bound");
      }
    } else {
      const double nan = std::nan("");
      csv.row(r.delta, nan, nan, nan, nan, nan);
      v.fail("delta " + format_double(r.delta) + ": " + r.failure);
    }
    rows.push_back({{"delta", r.delta},
                    {"delta0", r.delta0},
                    {"residual_full", r.residual_full},
                    {"residual_leading", r.residual_leading},
                    {"residual_over_delta2", r.residual_full / (r.delta * r.delta)},
                    {"stress_gap", r.stress_gap},
                    {"strain_gap", r.strain_gap},
                    {"solution_norm", r.solution_norm},
                    {"solver_iterations", r.solver_iterations},
                    {"in_domain", r.in_domain},
                    {"interior_ball_ok", r.interior_ball_ok},
                    {"ok", r.ok},
                    {"failure", r.failure}});
  }
  report["records"] = rows;
  report["fitted_order_full"] = or_null(rep.fitted_order_full);
  report["fitted_order_leading"] = or_null(rep.fitted_order_leading);
  report["fitted_order_stress"] = or_null(rep.fitted_order_stress);
  report["fitted_order_strain"] = or_null(rep.fitted_order_strain);
  report["richardson_full"] = rep.richardson_full;
  // An exactly-zero residual series is a perfect fit, not a failure.
  if (rep.fitted_order_full && !in_window(rep.fitted_order_full, t.order_min, t.order_max)) {
    v.fail(describe_window("fitted_order_full", rep.fitted_order_full, t.order_min, t.order_max));
  }
  if (!in_window(rep.fitted_order_stress, t.stress_order_min, t.stress_order_max)) {
    v.fail(describe_window("fitted_order_stress", rep.fitted_order_stress, t.stress_order_min, t.stress_order_max));
  }
  return v;
}

Verdict do_certify(const ExperimentConfig& c, Csv& csv, json& report) {
  Verdict v;
  const std::uint64_t seed = resolve_seed(c);
  const CertificateReport rep = certify_constants(c.family, c.deltas, c.samples, seed);
  json rows = json::array();
  for (const auto& r : rep.rows) {
    csv.row(r.delta, r.C0_hat, r.C1_hat, r.D0_hat, r.C3_hat);
    rows.push_back(
        {{"delta", r.delta}, {"C0_hat", r.C0_hat}, {"C1_hat", r.C1_hat}, {"D0_hat", r.D0_hat}, {"C3_hat", r.C3_hat}});
  }
  report["rows"] = rows;
  report["C0_hat"] = rep.C0_hat;
  report["C1_hat"] = rep.C1_hat;
  report["D0_hat"] = rep.D0_hat;
  report["C3_hat"] = rep.C3_hat;
  report["samples"] = rep.samples;
  report["seed"] = rep.seed;

  const Thresholds& t = c.thresholds;
  std::optional<double> c0 = t.C0_max, c1 = t.C1_max, d0 = t.D0_max;
  const FamilySpec& f = c.family;
  if (f.kind == FamilyKind::power_law) {
    if (!c0) c0 = 1.0 + 1e-9;
    if (!c1) c1 = 1e-12;
    if (!d0) d0 = 2.0 * f.a + 1e-6;
  } else if (f.kind == FamilyKind::density_modulus_reciprocal || f.kind == FamilyKind::density_modulus_direct) {
    if (!c0) c0 = density_bound_C0(f);
    // The Lipschitz constants are not sharp; sampled quotients get a factor 2.
    if (!c1) c1 = 2.0 * density_lipschitz_E(f);
    if (!d0) d0 = 2.0 * density_lipschitz_S(f);
  }
  const auto check = [&](const char* name, double value, const std::optional<double>& bound) {
    if (bound && !(value <= *bound)) {
      v.fail(std::string(name) + " " + format_double(value) + " exceeds " + format_double(*bound));
    }
  };
  check("C0_hat", rep.C0_hat, c0);
  check("C1_hat", rep.C1_hat, c1);
  check("D0_hat", rep.D0_hat, d0);
  if (!std::isfinite(rep.C3_hat)) v.fail("C3_hat is not finite");
  report["bounds"] = {{"C0_max", or_null(c0)}, {"C1_max", or_null(c1)}, {"D0_max", or_null(d0)}};
  return v;
}

Verdict do_oned(const ExperimentConfig& c, Csv& csv, json& report) {
  Verdict v;
  const Scalar1DParams params{c.family.a, c.family.p, c.deltas.front()};
  const OneDStudy study = oned_delta0_study(params, c.stress);
  double worst = 0.0;
  for (const auto& r : study.rows) {
    csv.row(r.Sbar, r.E, r.eps, r.delta0, r.sigma, r.gap);
    const double back = oned_invert(params, oned_forward(params, r.Sbar));
    const double rel = r.Sbar == 0.0 ? std::abs(back) : std::abs(back - r.Sbar) / std::abs(r.Sbar);
    worst = std::max(worst, rel);
  }
  report["gap_slope"] = or_null(study.gap_slope);
  report["max_linear_ratio"] = study.max_linear_ratio;
  report["max_quadratic_ratio"] = study.max_quadratic_ratio;
  report["max_round_trip_error"] = worst;
  const Thresholds& t = c.thresholds;
  if (!(worst <= t.round_trip_tol)) v.fail("round trip error " + format_double(worst));
  if (!in_window(study.gap_slope, t.slope_min, t.slope_max)) {
    v.fail(describe_window("gap_slope", study.gap_slope, t.slope_min, t.slope_max));
  }
  return v;
}

SymTensor draw_in_ball(std::mt19937_64& rng, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::array<double, 6> g{};
  double n2 = 0.0;
  while (!(n2 > 0.0)) {
    n2 = 0.0;
    for (double& x : g) {
      x = normal(rng);
      n2 += x * x;
    }
  }
  const double r = radius * std::pow(uniform(rng), 1.0 / 6.0) / std::sqrt(n2);
  const double k = r / std::sqrt(2.0);
  return {r * g[0], r * g[1], r * g[2], k * g[3], k * g[4], k * g[5]};
}

// sup over s ≥ 0 of s·|Ẽ| − W*(s·Ẽ/|Ẽ|); the maximizer of a radial potential
// points along Ẽ.
double radial_conjugate(const EnergyProfile& profile, const SymTensor& Et, double sMax) {
  const double e = frobenius(Et);
  if (e == 0.0) return 0.0;
  const SymTensor dir = Et / e;
  const auto negated = [&](double s) { return -(s * e - complementary_energy(profile, s * dir)); };
  const auto [s, val] = boost::math::tools::brent_find_minima(negated, 0.0, sMax, 52);
  return -val;
}

Verdict do_energy(const ExperimentConfig& c, Csv& csv, json& report) {
  Verdict v;
  EnergyProfile profile;
  profile.family = c.family;
  std::mt19937_64 rng(resolve_seed(c));
  const double delta = c.deltas.front();
  const double stressRadius = c.family.c;
  double gradWorst = 0.0, fyWorst = 0.0, pairWorst = 0.0;
  for (int i = 0; i < c.samples; ++i) {
    const SymTensor S = draw_in_ball(rng, stressRadius);
    const SymTensor Et = draw_in_ball(rng, 0.9);
    const double gradErr =
        frobenius(complementary_energy_gradient(profile, S) - family_leading_unchecked(c.family, SymTensor::zero(), S));
    const SymTensor Sstar = leading_inverse(profile, Et);
    const double W = legendre_transform(profile, Et);
    const double fy = std::abs(W - radial_conjugate(profile, Et, 4.0 * frobenius(Sstar) + 1.0));
    const SymTensor eps = delta * Et;
    const SymTensor sigma = green_stress(profile, delta, eps);
    const double pairErr =
        frobenius(delta * family_leading_unchecked(c.family, SymTensor::zero(), sigma) - eps) / delta;
    csv.row(i, frobenius(S), gradErr, frobenius(Et), fy, pairErr);
    gradWorst = std::max(gradWorst, gradErr);
    fyWorst = std::max(fyWorst, fy);
    pairWorst = std::max(pairWorst, pairErr);
  }
  report["max_gradient_error"] = gradWorst;
  report["max_fenchel_young_gap"] = fyWorst;
  report["max_inverse_pair_error"] = pairWorst;
  report["samples"] = c.samples;
  report["seed"] = resolve_seed(c);
  const Thresholds& t = c.thresholds;
  if (!(gradWorst <= t.gradient_tol)) v.fail("gradient error " + format_double(gradWorst));
  if (!(fyWorst <= t.fenchel_young_tol)) v.fail("Fenchel-Young gap " + format_double(fyWorst));
  if (!(pairWorst <= t.inverse_pair_tol)) v.fail("inverse-pair error " + format_double(pairWorst));
  return v;
}

}  // namespace

std::string csv_header(Command command) {
  switch (command) {
    case Command::solve: return "delta,E_xx,E_yy,E_zz,E_xy,E_xz,E_yz,residual,iterations,method,in_domain,interior_ball_ok";
    case Command::converge:
    case Command::converge_hencky: return "delta,delta0,residual_full,residual_leading,stress_gap,strain_gap";
    case Command::certify: return "delta,C0_hat,C1_hat,D0_hat,C3_hat";
    case Command::oned: return "Sbar,E,eps,delta0,sigma,gap";
    case Command::energy: return "sample,Sbar_norm,gradient_error,Etilde_norm,fenchel_young_gap,inverse_pair_error";
  }
  return "";
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error(ErrorCode::ConfigInvalid, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunOutcome run(const ExperimentConfig& config, std::ostream& log) {
  RunOutcome outcome;
  const std::string name = to_string(config.command);
  try {
    config.validate();
    resolve_seed(config);
  } catch (const Error& e) {
    outcome.status = kExitConfig;
    outcome.summary = "ERROR " + name + ": " + e.what();
    log << outcome.summary << '\n';
    return outcome;
  }

  Csv csv(csv_header(config.command));
  json report = {{"command", name}, {"config", config_to_json(config)}};
  Verdict verdict;
  try {
    switch (config.command) {
      case Command::solve: verdict = do_solve(config, csv, report); break;
      case Command::converge:
      case Command::converge_hencky: verdict = do_converge(config, csv, report); break;
      case Command::certify: verdict = do_certify(config, csv, report); break;
      case Command::oned: verdict = do_oned(config, csv, report); break;
      case Command::energy: verdict = do_energy(config, csv, report); break;
    }
  } catch (const Error& e) {
    verdict.fail(std::string(to_string(e.code())) + ": " + e.what());
  }
  report["pass"] = verdict.pass;
  report["detail"] = verdict.detail;

  try {
    const std::filesystem::path dir(config.output_path);
    std::filesystem::create_directories(dir);
    const auto csvPath = dir / (name + ".csv");
    const auto jsonPath = dir / (name + ".json");
    write_atomic(csvPath, csv.str());
    write_atomic(jsonPath, report.dump(2) + "\n");
    outcome.files = {csvPath, jsonPath};
  } catch (const std::exception& e) {
    outcome.status = kExitConfig;
    outcome.summary = std::string("ERROR ") + name + ": " + e.what();
    log << outcome.summary << '\n';
    return outcome;
  }

  outcome.status = verdict.pass ? kExitPass : kExitFail;
  outcome.summary = (verdict.pass ? "PASS " : "FAIL ") + name + (verdict.pass ? "" : ": " + verdict.detail);
  log << outcome.summary << '\n';
  return outcome;
}

}  // namespace strainlim
