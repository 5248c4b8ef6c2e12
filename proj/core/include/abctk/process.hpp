#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace abctk {

/// Absolute path of `program`: names with a slash are taken relative to `base`; bare names
/// are looked up in `base` first and then on PATH. Throws SimulatorError when not found or
/// not executable.
std::filesystem::path resolve_program(const std::string& program, const std::filesystem::path& base);

struct ProcessResult {
    int exit_code = 0;
    bool signaled = false;
    bool ok() const { return !signaled && exit_code == 0; }
};

/// Runs `program args...` inside `workdir`, with stdout and stderr appended to `log_file`.
ProcessResult run_process(const std::filesystem::path& program, const std::vector<std::string>& args,
                          const std::filesystem::path& workdir, const std::filesystem::path& log_file);

}  // namespace abctk
