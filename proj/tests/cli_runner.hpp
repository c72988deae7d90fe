#pragma once

// Runs the CLI binary through the shell and captures stdout and the exit code.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

namespace cli {

struct Result {
  int exit_code = -1;
  std::string out;
};

inline Result run(const std::string& args, bool merge_stderr = false,
                  const std::string& env = "") {
  std::string command = env + std::string(SYNCHRONY_LAB_CLI) + " " + args;
  command += merge_stderr ? " 2>&1" : " 2>/dev/null";
  Result result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) {
    return result;
  }
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.out.append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::string data(const std::string& name) {
  return std::string(SYNCHRONY_LAB_TEST_DATA) + "/" + name;
}

}  // namespace cli
