#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pif::cli {

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on usage, parse or validation errors, 2 on capacity errors and
/// for experiments whose external data is missing. Output files are written
/// atomically; on failure no output file is created.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pif::cli
