#pragma once

// JSON experiment configuration for the batch runner.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strainlim/families.hpp"
#include "strainlim/kinematics.hpp"
#include "strainlim/solver.hpp"

namespace strainlim {

enum class Command { solve, converge, converge_hencky, certify, oned, energy };

std::string to_string(Command command);
Command command_from_string(const std::string& name);

/// PASS/FAIL windows. Defaults mirror the acceptance criteria.
struct Thresholds {
  double order_min = 1.9;
  double order_max = 2.1;
  double stress_order_min = 0.9;
  double stress_order_max = 1.1;
  double stress_gap_factor = 10.0;  // per-row |σ − S̄| ≤ factor·δ·|S̄|
  // certify; unset means the family's analytic bound
  std::optional<double> C0_max;
  std::optional<double> C1_max;
  std::optional<double> D0_max;
  // oned
  double round_trip_tol = 1e-12;
  double slope_min = 0.9;
  double slope_max = 1.1;
  // energy
  double gradient_tol = 1e-6;
  double fenchel_young_tol = 1e-9;
  double inverse_pair_tol = 1e-8;
};

struct ExperimentConfig {
  Command command = Command::converge;
  FamilySpec family;
  /// Six components (xx, yy, zz, xy, xz, yz). For oned: the S̄ sample list.
  std::vector<double> stress;
  RotationSpec rotation;
  std::vector<double> deltas;
  int samples = 100;
  std::optional<std::uint64_t> seed;
  std::string output_path = ".";
  DomainPolicy domain_policy = DomainPolicy::enforce;
  Thresholds thresholds;

  /// Throws Error(ConfigInvalid) describing the first violated rule.
  void validate() const;
  [[nodiscard]] SymTensor stress_tensor() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Seed precedence: explicit override, config, STRAINLIM_SEED, then 0.
std::uint64_t resolve_seed(const ExperimentConfig& config);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

}  // namespace strainlim
