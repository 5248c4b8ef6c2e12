#include "abctk/process.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "abctk/error.hpp"

namespace abctk {

namespace {

bool executable(const std::filesystem::path& p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

}  // namespace

std::filesystem::path resolve_program(const std::string& program, const std::filesystem::path& base) {
    if (program.empty()) throw SimulatorError("empty program name");
    if (program.find('/') != std::string::npos) {
        const auto p = std::filesystem::path(program).is_absolute() ? std::filesystem::path(program) : base / program;
        if (!executable(p)) throw SimulatorError("program '" + program + "' does not exist or is not executable");
        return p.lexically_normal();
    }
    if (executable(base / program)) return (base / program).lexically_normal();
    if (const char* path = std::getenv("PATH")) {
        std::string dirs = path;
        std::size_t start = 0;
        while (start <= dirs.size()) {
            const auto end = std::min(dirs.find(':', start), dirs.size());
            const std::filesystem::path dir = dirs.substr(start, end - start);
            if (!dir.empty() && executable(dir / program)) return dir / program;
            start = end + 1;
        }
    }
    throw SimulatorError("program '" + program + "' not found in the working directory or on PATH");
}

ProcessResult run_process(const std::filesystem::path& program, const std::vector<std::string>& args,
                          const std::filesystem::path& workdir, const std::filesystem::path& log_file) {
    std::vector<std::string> storage;
    storage.push_back(program.string());
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) throw SimulatorError(std::string("fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        if (::chdir(workdir.c_str()) != 0) ::_exit(126);
        const int fd = ::open(log_file.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
        if (fd >= 0) {
            ::dup2(fd, STDOUT_FILENO);
            ::dup2(fd, STDERR_FILENO);
            ::close(fd);
        }
        ::execv(argv[0], argv.data());
        ::_exit(127);
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) throw SimulatorError(std::string("waitpid failed: ") + std::strerror(errno));
    }
    ProcessResult out;
    if (WIFSIGNALED(status)) {
        out.signaled = true;
        out.exit_code = 128 + WTERMSIG(status);
    } else {
        out.exit_code = WEXITSTATUS(status);
    }
    return out;
}

}  // namespace abctk
