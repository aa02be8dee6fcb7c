#pragma once

#include <iosfwd>

#include "config.hpp"

namespace forest::cli {

// Each command writes its artifact(s) to the given stream(s) and returns the
// process exit code: 0 success, 3 inconclusive spectrum. Validation problems
// throw ConfigError (exit 1); numerical failures propagate std::exception
// (exit 2).
int run_equilibria(const RunConfig& cfg, std::ostream& out);
int run_curve(const RunConfig& cfg, std::ostream& out);
int run_spectrum(const RunConfig& cfg, std::ostream& out);
int run_simulate(const RunConfig& cfg, std::ostream& csv, std::ostream& summary);
int run_sweep(const RunConfig& cfg, std::ostream& out, int workers);

}  // namespace forest::cli
