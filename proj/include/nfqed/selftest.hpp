#pragma once

#include <string>
#include <vector>

namespace nfqed {

struct SelftestResult {
    std::string group;
    bool passed = false;
    std::string detail;
};

// Fast invariant checks over the library (seconds); one entry per group.
std::vector<SelftestResult> run_selftest(unsigned threads);

}  // namespace nfqed
