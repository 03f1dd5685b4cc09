#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace drsafe::cli {

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::string> x;  // "v1,v2,..."
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  bool svg = false;
  std::string which;  // check: necessary, sufficient1 or sufficient3
};

// Exit codes: 0 Optimal, 2 Infeasible, 1 error.
int cmd_solve(const CommandOptions& opts, std::ostream& out);
// Exit codes: 0 CertifiedFeasible, 2 CertifiedInfeasible, 3 Inconclusive,
// 4 NotApplicable, 1 error.
int cmd_check(const CommandOptions& opts, std::ostream& out);
int cmd_simulate(const CommandOptions& opts, std::ostream& out);
int cmd_bench(const CommandOptions& opts, std::ostream& out);
int cmd_lipschitz(const CommandOptions& opts, std::ostream& out);

}  // namespace drsafe::cli
