#pragma once

#include "psm/model.hpp"

namespace psm {

struct OracleSolution {
    PublicPolicy policy;
    Rat value;
};

// Ground-truth optimum over the full meta-signal space. Exhaustive and tiny:
// n <= 2 enumerates all weak-order profiles, n = 3 is allowed with strict
// profiles only (exact for non-degenerate instances).
OracleSolution solve_oracle_public(const Instance& inst, int n_cap_weak = 2,
                                   int n_cap_strict = 3);

// Benchmark where the signal is the matching alone (n <= 2, two worlds):
// each matching commits to a single preference cell for its posterior.
OracleSolution solve_oracle_restricted(const Instance& inst);

}  // namespace psm
