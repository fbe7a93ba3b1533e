#pragma once
#include <string>
#include <vector>

namespace seqdesign {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Invariant and oracle checks over small built-in problems. Takes a few
// seconds; used by the `verify` subcommand.
std::vector<CheckResult> run_verification();

}  // namespace seqdesign
