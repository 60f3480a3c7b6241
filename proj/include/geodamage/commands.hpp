#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace geodamage {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitCheck = 3 };

struct CommandOptions {
  std::string config;
  std::string out;
  std::string dir;
  bool quiet = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> from_time;
  std::optional<double> to_time;
};

int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep_eps(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_rescale(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_oracle(const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace geodamage
