#pragma once

#include <ostream>

namespace geoanneal::cli {

// Runs the command line; returns the process exit status. Results go to
// files, progress to `out`, and failures to `err` as a one-line JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geoanneal::cli
