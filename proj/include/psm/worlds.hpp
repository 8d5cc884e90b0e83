#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psm/model.hpp"
#include "psm/region.hpp"

namespace psm {

// A pairwise value-difference vector owned by one agent.
struct DifferenceVector {
    Side side;
    int agent;
    int y, yy;              // the compared opposite-side pair
    std::vector<Rat> vec;   // per-world v_x(y|w) - v_x(yy|w)
};

struct DegeneracyReport {
    bool non_degenerate = true;
    std::vector<DifferenceVector> witness;  // a dependent realizable subset
};

// Degenerate iff some realizable size-|worlds| set of difference vectors is
// linearly dependent. Realizable: per agent, the chosen pairs can appear as
// consecutive pairs of one total order, i.e. they form vertex-disjoint simple
// paths over that agent's partner set.
DegeneracyReport check_non_degenerate(const Instance& inst,
                                      std::uint64_t subset_guard = 2000000);

// Adds independent uniform grid noise from (-eps, eps) to every agent value.
Instance perturb(const Instance& inst, const Rat& eps, std::uint64_t seed);

struct ProperCell {
    PreferenceProfile profile;  // strict
    Region region;              // closure of the cell
    Posterior witness;          // interior point inducing exactly profile
};

// All full-dimensional preference cells of the posterior simplex.
std::vector<ProperCell> enumerate_proper_cells(const Instance& inst, int world_cap = 3);

struct BmpResult {
    std::vector<Matching> matchings;  // one per signal slot
    Rat value;
};

// Per-slot weighted stable matching with weights mu(w) gamma(l,w) u(a,b|w).
BmpResult solve_bmp(const Instance& inst, const std::vector<PreferenceProfile>& profiles,
                    const std::vector<std::vector<Rat>>& gamma);

struct WorldsSolution {
    PublicPolicy policy;
    Rat value;
    bool heuristic = false;  // degeneracy detected; optimality not guaranteed
    DegeneracyReport degeneracy;
};

// Optimal public policy with at most |worlds| meta-signals, by enumerating
// size-|worlds| multisets of proper cells, the vertices of each mass-split
// polytope, and a best-matching subproblem per vertex.
WorldsSolution solve_public_small_worlds(const Instance& inst, int world_cap = 3);

}  // namespace psm
