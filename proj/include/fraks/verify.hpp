#pragma once

#include <string>
#include <vector>

#include "fraks/diagnostics.hpp"

namespace fraks::verify {

struct SuiteOptions {
  // Negative-control fixture: flips the sign of the dissipation term.
  bool inject_sign_error = false;
};

// specfun, operators, inequalities, regimes, blowup.
const std::vector<std::string>& suite_names();

// "all" runs every suite in order. Throws UsageError on an unknown name.
std::vector<diagnostics::Check> run_suite(const std::string& name, const SuiteOptions& opt = {});

}  // namespace fraks::verify
