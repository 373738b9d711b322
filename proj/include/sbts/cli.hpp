#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sbts::cli {

std::string version();

//! Exit codes of the command line front-end.
enum ExitCode : int
{
  ok = 0,
  invalid = 1, // bad config, bad input, missing file
  failure = 2, // runtime error during computation
};

//! Runs one subcommand on the config at `config_path`. Relative paths in the
//! config are resolved against the config file's directory. Prints a
//! one-line JSON summary to `out` on success and a message to `err`
//! otherwise. `seed` overrides the config's seed.
int run_command(const std::string& command,
                const std::filesystem::path& config_path,
                std::ostream& out,
                std::ostream& err,
                std::optional<std::uint64_t> seed = {},
                bool verbose = false);

//! Full command line: `sbts <subcommand> --config FILE [--threads N] [--seed S] [-v]`,
//! or `sbts --version`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sbts::cli
