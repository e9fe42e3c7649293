#pragma once

#include <string>

namespace erc {

// Optional progress hook (the CLI wires this to stderr). Training output
// files never depend on it.
using LogHook = void (*)(const char* line, void* user);

void set_log_hook(LogHook fn, void* user);
void log_line(const std::string& line);

}  // namespace erc
