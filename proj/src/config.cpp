#include "strainlim/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "strainlim/errors.hpp"
#include "strainlim/scalar1d.hpp"

namespace strainlim {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) invalid("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v);
  out = v;
}

FamilySpec family_from_json(const json& j) {
  if (!j.is_object()) invalid("'family' must be an object");
  reject_unknown(j, {"kind", "a", "p", "E0", "nu", "b", "c", "delta1", "delta_max", "base"}, "family");
  FamilySpec f;
  std::string kind = to_string(f.kind);
  read(j, "kind", kind);
  try {
    f.kind = family_kind_from_string(kind);
  } catch (const Error& e) {
    invalid(e.what());
  }
  read(j, "a", f.a);
  read(j, "p", f.p);
  read(j, "E0", f.E0);
  read(j, "nu", f.nu);
  read(j, "b", f.b);
  read(j, "c", f.c);
  read(j, "delta1", f.delta1);
  read_optional(j, "delta_max", f.delta_max);
  read(j, "base", f.base_name);
  try {
    f.bind_base();
  } catch (const Error& e) {
    invalid(e.what());
  }
  return f;
}

json family_to_json(const FamilySpec& f) {
  json j = {{"kind", to_string(f.kind)}, {"a", f.a}, {"p", f.p},   {"E0", f.E0},
            {"nu", f.nu},                {"b", f.b}, {"c", f.c},   {"delta1", f.delta1}};
  if (f.delta_max) j["delta_max"] = *f.delta_max;
  if (f.kind == FamilyKind::scaled_base) j["base"] = f.base_name;
  return j;
}

Thresholds thresholds_from_json(const json& j) {
  if (!j.is_object()) invalid("'thresholds' must be an object");
  reject_unknown(j,
                 {"order_min", "order_max", "stress_order_min", "stress_order_max", "stress_gap_factor", "C0_max",
                  "C1_max", "D0_max", "round_trip_tol", "slope_min", "slope_max", "gradient_tol",
                  "fenchel_young_tol", "inverse_pair_tol"},
                 "thresholds");
  Thresholds t;
  read(j, "order_min", t.order_min);
  read(j, "order_max", t.order_max);
  read(j, "stress_order_min", t.stress_order_min);
  read(j, "stress_order_max", t.stress_order_max);
  read(j, "stress_gap_factor", t.stress_gap_factor);
  read_optional(j, "C0_max", t.C0_max);
  read_optional(j, "C1_max", t.C1_max);
  read_optional(j, "D0_max", t.D0_max);
  read(j, "round_trip_tol", t.round_trip_tol);
  read(j, "slope_min", t.slope_min);
  read(j, "slope_max", t.slope_max);
  read(j, "gradient_tol", t.gradient_tol);
  read(j, "fenchel_young_tol", t.fenchel_young_tol);
  read(j, "inverse_pair_tol", t.inverse_pair_tol);
  return t;
}

json thresholds_to_json(const Thresholds& t) {
  json j = {{"order_min", t.order_min},
            {"order_max", t.order_max},
            {"stress_order_min", t.stress_order_min},
            {"stress_order_max", t.stress_order_max},
            {"stress_gap_factor", t.stress_gap_factor},
            {"round_trip_tol", t.round_trip_tol},
            {"slope_min", t.slope_min},
            {"slope_max", t.slope_max},
            {"gradient_tol", t.gradient_tol},
            {"fenchel_young_tol", t.fenchel_young_tol},
            {"inverse_pair_tol", t.inverse_pair_tol}};
  if (t.C0_max) j["C0_max"] = *t.C0_max;
  if (t.C1_max) j["C1_max"] = *t.C1_max;
  if (t.D0_max) j["D0_max"] = *t.D0_max;
  return j;
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::solve: return "solve";
    case Command::converge: return "converge";
    case Command::converge_hencky: return "converge-hencky";
    case Command::certify: return "certify";
    case Command::oned: return "oned";
    case Command::energy: return "energy";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (Command c : {Command::solve, Command::converge, Command::converge_hencky, Command::certify, Command::oned,
                    Command::energy}) {
    if (to_string(c) == name) return c;
  }
  invalid("unknown command '" + name + "'");
}

SymTensor ExperimentConfig::stress_tensor() const {
  if (stress.size() != 6) invalid("stress needs 6 components (xx, yy, zz, xy, xz, yz)");
  return SymTensor{stress[0], stress[1], stress[2], stress[3], stress[4], stress[5]};
}

void ExperimentConfig::validate() const {
  try {
    family.validate();
  } catch (const Error& e) {
    invalid(std::string("family: ") + e.what());
  }
  if (deltas.empty()) invalid("deltas must not be empty");
  for (double s : stress)
    if (!std::isfinite(s)) invalid("stress entries must be finite");

  if (command == Command::oned) {
    if (stress.empty()) invalid("oned needs at least one stress value");
    if (deltas.size() != 1) invalid("oned takes exactly one delta");
    try {
      Scalar1DParams{family.a, family.p, deltas.front()}.validate();
    } catch (const Error& e) {
      invalid(std::string("oned: ") + e.what());
    }
    return;
  }

  const double ceiling = admissible_delta(family);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] <= ceiling)) {
      invalid("delta " + format_double(deltas[i]) + " outside (0, " + format_double(ceiling) + "]");
    }
    if (i > 0 && !(deltas[i] < deltas[i - 1])) invalid("deltas must be strictly decreasing");
  }
  if ((command == Command::converge || command == Command::converge_hencky) && deltas.size() < 4) {
    invalid("convergence studies need at least 4 deltas");
  }
  if (command == Command::certify && samples < 100) invalid("certify needs samples >= 100");
  if (command == Command::energy && samples < 1) invalid("energy needs samples >= 1");
  if (command == Command::solve || command == Command::converge || command == Command::converge_hencky) {
    const SymTensor S = stress_tensor();
    if (domain_policy == DomainPolicy::enforce && !domain(family, deltas.front()).contains_stress(S)) {
      invalid("stress lies outside the family's stress domain");
    }
  }
  if (command == Command::energy &&
      !(family.kind == FamilyKind::power_law || (family.kind == FamilyKind::scaled_base && family.base.stress_only &&
                                                 family.base.potential))) {
    invalid("energy needs a power_law family or a scaled_base with a gradient base");
  }
  if (thresholds.order_min > thresholds.order_max || thresholds.stress_order_min > thresholds.stress_order_max ||
      thresholds.slope_min > thresholds.slope_max) {
    invalid("threshold windows must have min <= max");
  }
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) invalid("config must be a JSON object");
  reject_unknown(j,
                 {"command", "family", "stress", "rotation", "deltas", "samples", "seed", "output_path",
                  "domain_policy", "thresholds"},
                 "config");
  ExperimentConfig c;
  std::string cmd;
  if (!j.contains("command")) invalid("missing 'command'");
  read(j, "command", cmd);
  c.command = command_from_string(cmd);
  if (j.contains("family")) c.family = family_from_json(j.at("family"));
  if (j.contains("stress")) {
    const json& s = j.at("stress");
    if (s.is_number()) {
      c.stress = {s.get<double>()};
    } else {
      read(j, "stress", c.stress);
    }
  }
  if (j.contains("rotation")) {
    const json& r = j.at("rotation");
    if (!r.is_object()) invalid("'rotation' must be an object");
    reject_unknown(r, {"axis", "magnitude_coefficient"}, "rotation");
    std::vector<double> axis(c.rotation.axis.begin(), c.rotation.axis.end());
    read(r, "axis", axis);
    if (axis.size() != 3) invalid("rotation axis needs 3 components");
    std::copy(axis.begin(), axis.end(), c.rotation.axis.begin());
    read(r, "magnitude_coefficient", c.rotation.magnitude_coefficient);
  }
  read(j, "deltas", c.deltas);
  read(j, "samples", c.samples);
  read_optional(j, "seed", c.seed);
  read(j, "output_path", c.output_path);
  if (j.contains("domain_policy")) {
    std::string p;
    read(j, "domain_policy", p);
    try {
      c.domain_policy = domain_policy_from_string(p);
    } catch (const Error& e) {
      invalid(e.what());
    }
  }
  if (j.contains("thresholds")) c.thresholds = thresholds_from_json(j.at("thresholds"));
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j = {{"command", to_string(c.command)},
            {"family", family_to_json(c.family)},
            {"stress", c.stress},
            {"rotation",
             {{"axis", std::vector<double>(c.rotation.axis.begin(), c.rotation.axis.end())},
              {"magnitude_coefficient", c.rotation.magnitude_coefficient}}},
            {"deltas", c.deltas},
            {"samples", c.samples},
            {"output_path", c.output_path},
            {"domain_policy", to_string(c.domain_policy)},
            {"thresholds", thresholds_to_json(c.thresholds)}};
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string serialize_config(const ExperimentConfig& config) { return config_to_json(config).dump(2) + "\n"; }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t resolve_seed(const ExperimentConfig& config) {
  if (config.seed) return *config.seed;
  if (const char* env = std::getenv("STRAINLIM_SEED")) {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || ptr != end) invalid("STRAINLIM_SEED is not an unsigned integer");
    return v;
  }
  return 0;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace strainlim
