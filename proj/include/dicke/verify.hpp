#pragma once

#include <string>
#include <vector>

namespace dicke {

/// One row of the built-in oracle suite.
struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Cross-checks run by `dicke verify`:
///  - gauge-invariant assembly against the operator-function matrix (elementwise and E0),
///  - Lanczos against dense diagonalization for the Dicke matrix,
///  - the large-N scaling map for N=80 vs N1=70 at two couplings.
std::vector<VerifyCheck> run_verification_suite();

}  // namespace dicke
