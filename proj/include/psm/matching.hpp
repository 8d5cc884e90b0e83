#pragma once

#include <vector>

#include "psm/model.hpp"

namespace psm {

// Weighted stable matching: find a stable matching (under the given
// preference profile) maximizing the total pair weight.
struct WsmProblem {
    PreferenceProfile profile;
    std::vector<std::vector<Rat>> weights;  // weights[i][j] for (a_i, b_j)

    int n() const { return int(weights.size()); }
    void validate() const;  // InputError on ragged weights or bad profile
};

// A-proposing deferred acceptance; requires strict complete preferences.
Matching gale_shapley(const PreferenceProfile& prof);

struct WsmResult {
    Matching matching;
    Rat value;
};

// Exact optimum over stable matchings via the stable-matching-polytope LP.
// Strict preferences only; every basic optimum is integral. Ties in total
// weight break toward the lexicographically smallest partner vector.
WsmResult wsm_strict(const WsmProblem& prob);

// Exhaustive variant tolerating ties in the profile. Same tie-breaking.
WsmResult wsm_brute(const WsmProblem& prob, int cap = 7);

}  // namespace psm
