#pragma once

#include <optional>
#include <vector>

#include "psm/model.hpp"

namespace psm {

// A convex region of posteriors cut out of the probability simplex by
// homogeneous inequalities row.q >= 0. The rows are scale-free, so they also
// describe the cone over the region; membership of unnormalized mass vectors
// is the constraint form used inside the policy LPs.
struct Region {
    int W = 0;
    std::vector<std::vector<Rat>> rows;  // each: row . q >= 0

    static Region full(int W) { return Region{W, {}}; }

    void add_row(std::vector<Rat> row);

    bool contains(const Posterior& p) const;
    bool contains_mass(const std::vector<Rat>& q) const;  // homogeneous form
    bool nonempty() const;                                // intersects the simplex
    std::optional<Posterior> any_point() const;
    // every simplex point of other satisfies this region's rows
    bool superset_of(const Region& other) const;

    Region intersect(const Region& other) const;
};

// vals[y][w]: the ranking agent's value for opposite-side member y in world w.

// Cell of one agent's (possibly weak) order: adjacent tiers separated weakly,
// ties pinned by equalities.
Region order_region(int W, const std::vector<std::vector<Rat>>& vals,
                    const AgentOrder& o);

// Posteriors where exactly the members flagged in `above` are weakly
// preferred to `partner` and all others are weakly worse. Any point of this
// region admits a full order whose strictly-better-than-partner set is
// exactly `above`.
Region above_set_region(int W, const std::vector<std::vector<Rat>>& vals,
                        int partner, const std::vector<bool>& above);

// Full order consistent with the values at p whose strictly-better set
// relative to partner is exactly `above`; requires p in above_set_region.
AgentOrder order_realizing_above_set(int W, const std::vector<std::vector<Rat>>& vals,
                                     int partner, const std::vector<bool>& above,
                                     const Posterior& p);

// vals matrix of one instance agent
std::vector<std::vector<Rat>> agent_values(const Instance& inst, Side side, int x);

// Vertices of the polytope cut out of the probability simplex by the
// region's rows; empty when the region misses the simplex.
std::vector<Posterior> cell_vertices(const Region& reg);

}  // namespace psm
