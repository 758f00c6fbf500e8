#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

namespace pftest {

struct CliResult {
  int code = -1;
  std::string out;
};

/// Runs the built CLI through the shell; stderr is discarded.
inline CliResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(PATTERNFORGE_CLI) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace pftest
