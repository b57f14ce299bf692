#pragma once

#include <string>
#include <vector>

namespace surfgrow::cli {

/* Experiment runner.  Subcommands: simulate | picard | blowup-scan |
   profiles | selfsimilar | inequality-sweep | verify.  Outputs land under
   --out (default "surfgrow_out", overridable by the SURFGROW_OUT variable);
   every run echoes its fully resolved configuration next to its artifacts.
   Returns 0 on success, 1 on validation/usage errors, 2 on numerical
   failure (a diagnostic file is left in the output directory). */
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace surfgrow::cli
