#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "strainlim/config.hpp"

namespace strainlim {

inline constexpr int kExitPass = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitFail = 2;

struct RunOutcome {
  int status = kExitPass;
  std::string summary;  // one line, starts with PASS or FAIL (or ERROR)
  std::vector<std::filesystem::path> files;
};

/// Runs one study, writes <output_path>/<command>.csv and .json atomically,
/// and prints the summary line to `log`.
RunOutcome run(const ExperimentConfig& config, std::ostream& log);

/// Replace `path` with `contents` via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string csv_header(Command command);

}  // namespace strainlim
