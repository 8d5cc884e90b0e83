#include "psm/worlds.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "psm/errors.hpp"
#include "psm/lp.hpp"
#include "psm/matching.hpp"

namespace psm {

namespace {

std::vector<DifferenceVector> all_difference_vectors(const Instance& inst) {
    std::vector<DifferenceVector> out;
    int n = inst.n(), W = inst.num_worlds();
    for (Side side : {Side::A, Side::B})
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int yy = y + 1; yy < n; ++yy) {
                    DifferenceVector d;
                    d.side = side;
                    d.agent = x;
                    d.y = y;
                    d.yy = yy;
                    d.vec.assign(size_t(W), Rat(0));
                    for (int w = 0; w < W; ++w)
                        d.vec[size_t(w)] =
                            inst.value(side, x, y, w) - inst.value(side, x, yy, w);
                    out.push_back(std::move(d));
                }
    return out;
}

// The pairs an agent contributes must be consecutive pairs of one total
// order, i.e. their graph on the partner set is a union of vertex-disjoint
// simple paths: every degree <= 2 and no cycles.
bool realizable(const std::vector<DifferenceVector>& sel, int n) {
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> by_agent;
    for (const auto& d : sel)
        by_agent[{d.side == Side::A ? 0 : 1, d.agent}].push_back({d.y, d.yy});
    for (auto& [key, edges] : by_agent) {
        std::vector<int> deg(size_t(n), 0);
        std::vector<int> parent(size_t(n), 0);
        for (int v = 0; v < n; ++v) parent[size_t(v)] = v;
        auto find = [&](int v) {
            while (parent[size_t(v)] != v) v = parent[size_t(v)];
            return v;
        };
        for (auto [y, yy] : edges) {
            if (++deg[size_t(y)] > 2 || ++deg[size_t(yy)] > 2) return false;
            int ry = find(y), ryy = find(yy);
            if (ry == ryy) return false;  // cycle
            parent[size_t(ry)] = ryy;
        }
    }
    return true;
}

// strict refinement of a weak order: tier order kept, ascending inside a tier
AgentOrder strict_refine(const AgentOrder& weak) {
    AgentOrder o;
    for (auto tier : weak.tiers) {
        std::sort(tier.begin(), tier.end());
        for (int y : tier) o.tiers.push_back({y});
    }
    return o;
}

PreferenceProfile strict_profile_at(const Instance& inst, const Posterior& p) {
    PreferenceProfile prof = induced_profile(inst, p);
    for (auto& o : prof.of_a) o = strict_refine(o);
    for (auto& o : prof.of_b) o = strict_refine(o);
    prof.strict = true;
    return prof;
}

Region closure_region(const Instance& inst, const PreferenceProfile& prof) {
    int W = inst.num_worlds();
    Region reg = Region::full(W);
    for (Side side : {Side::A, Side::B})
        for (int x = 0; x < inst.n(); ++x)
            reg = reg.intersect(
                order_region(W, agent_values(inst, side, x), prof.of(side, x)));
    return reg;
}

// point maximizing the worst slack of the given strict rows over the affine
// slice sum(p) = 1 with free coordinates (cells are cones, so the slice sees
// every cone whose closure meets the simplex); nullopt when no interior
// point exists
std::optional<Posterior> interior_point(const std::vector<std::vector<Rat>>& rows,
                                        int W) {
    LinearProgram lp;
    for (int w = 0; w < W; ++w) lp.add_var("p" + std::to_string(w), std::nullopt);
    int t = lp.add_var("t");
    lp.objective[size_t(t)] = 1;
    {
        std::vector<Rat> row(size_t(W + 1), Rat(1));
        row[size_t(t)] = 0;
        lp.add_con(row, Rel::Eq, Rat(1));
    }
    {
        std::vector<Rat> row(size_t(W + 1), Rat(0));
        row[size_t(t)] = 1;
        lp.add_con(row, Rel::Le, Rat(1));
    }
    for (const auto& r : rows) {
        std::vector<Rat> row(r.begin(), r.end());
        row.push_back(Rat(-1));
        lp.add_con(row, Rel::Ge, Rat(0));
    }
    auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal || res.value <= 0) return std::nullopt;
    return Posterior(res.x.begin(), res.x.begin() + W);
}

std::vector<ProperCell> cells_segment(const Instance& inst) {
    // Cells are cones in the plane; q parameterizes the affine line
    // p = (1-q, q) with q unrestricted. A cone realized only outside the
    // simplex can still touch it at an endpoint (its closure carries point
    // mass there), so crossings outside (0, 1) matter too. Kept intervals
    // are exactly those whose closure meets [0, 1].
    std::vector<Rat> cuts;
    for (const auto& d : all_difference_vectors(inst)) {
        const Rat& d0 = d.vec[0];
        const Rat& d1 = d.vec[1];
        if (d0 == d1) continue;  // level set parallel to the affine line
        cuts.push_back(d0 / (d0 - d1));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<ProperCell> cells;
    auto emit = [&](const Rat& q) {
        ProperCell cell;
        cell.witness = {Rat(1) - q, q};
        cell.profile = strict_profile_at(inst, cell.witness);
        cell.region = closure_region(inst, cell.profile);
        cells.push_back(std::move(cell));
    };
    // witness inside (0, 1) whenever the interval meets it, else just past
    // the touched endpoint
    auto pick = [&](bool lo_inf, const Rat& lo, bool hi_inf, const Rat& hi) {
        Rat l = lo_inf ? Rat(0) : std::max(lo, Rat(0));
        Rat h = hi_inf ? Rat(1) : std::min(hi, Rat(1));
        if (l < h) {
            emit((l + h) / 2);
        } else if (!hi_inf && hi == 0) {
            emit(lo_inf ? Rat(-1) : (lo + hi) / 2);
        } else if (!lo_inf && lo == 1) {
            emit(hi_inf ? Rat(2) : (lo + hi) / 2);
        }
    };
    if (cuts.empty()) {
        pick(true, Rat(0), true, Rat(0));
        return cells;
    }
    pick(true, Rat(0), false, cuts.front());
    for (size_t k = 0; k + 1 < cuts.size(); ++k)
        pick(false, cuts[k], false, cuts[k + 1]);
    pick(false, cuts.back(), true, Rat(0));
    return cells;
}

std::vector<ProperCell> cells_incremental(const Instance& inst) {
    int W = inst.num_worlds();
    struct Piece {
        std::vector<std::vector<Rat>> rows;
        Posterior witness;
    };
    std::vector<Piece> pieces;
    {
        Piece whole;
        whole.witness.assign(size_t(W), Rat(1, W));
        pieces.push_back(std::move(whole));
    }
    for (const auto& d : all_difference_vectors(inst)) {
        bool zero = std::all_of(d.vec.begin(), d.vec.end(),
                                [](const Rat& v) { return v == 0; });
        if (zero) continue;
        std::vector<Rat> neg(d.vec.size());
        for (size_t w = 0; w < d.vec.size(); ++w) neg[w] = -d.vec[w];
        std::vector<Piece> next;
        const std::vector<Rat>* halves[2] = {&d.vec, &neg};
        for (auto& piece : pieces)
            for (const std::vector<Rat>* h : halves) {
                Piece cut = piece;
                cut.rows.push_back(*h);
                if (auto p = interior_point(cut.rows, W)) {
                    cut.witness = *p;
                    next.push_back(std::move(cut));
                }
            }
        pieces = std::move(next);
    }
    std::vector<ProperCell> cells;
    for (const auto& piece : pieces) {
        ProperCell cell;
        cell.witness = piece.witness;
        cell.profile = strict_profile_at(inst, cell.witness);
        cell.region = closure_region(inst, cell.profile);
        // cones realized only away from the simplex can never carry mass
        if (!cell.region.nonempty()) continue;
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace

DegeneracyReport check_non_degenerate(const Instance& inst,
                                      std::uint64_t subset_guard) {
    inst.validate();
    int W = inst.num_worlds();
    auto vecs = all_difference_vectors(inst);
    int D = int(vecs.size());
    DegeneracyReport rep;
    if (D < W) return rep;
    Int combos = 1;
    for (int k = 0; k < W; ++k) combos = combos * (D - k) / (k + 1);
    if (combos > Int(subset_guard))
        throw CapacityError(
            "too many difference-vector subsets; perturb and spot-check instead");
    std::vector<int> idx(size_t(W), 0);
    auto rec = [&](auto&& self, int depth, int start) -> bool {
        if (depth == W) {
            std::vector<DifferenceVector> sel;
            for (int k = 0; k < W; ++k) sel.push_back(vecs[size_t(idx[size_t(k)])]);
            if (!realizable(sel, inst.n())) return false;
            std::vector<std::vector<Rat>> m;
            for (const auto& d : sel) m.push_back(d.vec);
            if (matrix_rank(m) < W) {
                rep.non_degenerate = false;
                rep.witness = std::move(sel);
                return true;
            }
            return false;
        }
        for (int i = start; i < D; ++i) {
            idx[size_t(depth)] = i;
            if (self(self, depth + 1, i + 1)) return true;
        }
        return false;
    };
    rec(rec, 0, 0);
    return rep;
}

Instance perturb(const Instance& inst, const Rat& eps, std::uint64_t seed) {
    inst.validate();
    if (eps <= 0) throw InputError("perturbation radius must be positive");
    std::mt19937_64 rng(seed);
    const int grid = 1 << 20;
    std::uniform_int_distribution<int> dist(-grid + 1, grid - 1);
    Instance out = inst;
    auto jitter = [&](std::vector<std::vector<std::vector<Rat>>>& cube) {
        for (auto& row : cube)
            for (auto& cell : row)
                for (auto& v : cell) v += eps * Rat(dist(rng), grid);
    };
    jitter(out.val_a);
    jitter(out.val_b);
    return out;
}

std::vector<ProperCell> enumerate_proper_cells(const Instance& inst, int world_cap) {
    inst.validate();
    int W = inst.num_worlds();
    if (W > world_cap)
        throw CapacityError("proper-cell enumeration capped at " +
                            std::to_string(world_cap) + " worlds");
    if (W == 1) {
        ProperCell cell;
        cell.witness = {Rat(1)};
        cell.profile = strict_profile_at(inst, cell.witness);
        cell.region = Region::full(1);
        return {cell};
    }
    if (W == 2) return cells_segment(inst);
    return cells_incremental(inst);
}

BmpResult solve_bmp(const Instance& inst,
                    const std::vector<PreferenceProfile>& profiles,
                    const std::vector<std::vector<Rat>>& gamma) {
    inst.validate();
    if (profiles.size() != gamma.size())
        throw InputError("bmp: one weight row per profile required");
    int n = inst.n(), W = inst.num_worlds();
    BmpResult res;
    res.value = 0;
    for (size_t l = 0; l < profiles.size(); ++l) {
        if (int(gamma[l].size()) != W) throw InputError("bmp: weight row size mismatch");
        WsmProblem prob;
        prob.profile = profiles[l];
        prob.weights.assign(size_t(n), std::vector<Rat>(size_t(n), Rat(0)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int w = 0; w < W; ++w)
                    prob.weights[size_t(i)][size_t(j)] +=
                        inst.prior[size_t(w)] * gamma[l][size_t(w)] *
                        inst.util[size_t(i)][size_t(j)][size_t(w)];
        auto best = wsm_strict(prob);
        res.matchings.push_back(best.matching);
        res.value += best.value;
    }
    return res;
}

WorldsSolution solve_public_small_worlds(const Instance& inst, int world_cap) {
    inst.validate();
    int W = inst.num_worlds();
    if (W > world_cap)
        throw CapacityError("small-worlds solver capped at " +
                            std::to_string(world_cap) + " worlds");
    WorldsSolution sol;
    sol.degeneracy = check_non_degenerate(inst);
    sol.heuristic = !sol.degeneracy.non_degenerate;

    auto cells = enumerate_proper_cells(inst, world_cap);
    int C = int(cells.size());
    bool found = false;

    std::vector<int> pick(size_t(W), 0);
    auto try_multiset = [&] {
        // feasible gamma region: per-world totals one, each signal's
        // unnormalized posterior mass inside its cell's cone
        LinearProgram lp;
        for (int l = 0; l < W; ++l)
            for (int w = 0; w < W; ++w)
                lp.add_var("g" + std::to_string(l) + "_" + std::to_string(w));
        for (int w = 0; w < W; ++w) {
            std::vector<Rat> row(size_t(W * W), Rat(0));
            for (int l = 0; l < W; ++l) row[size_t(l * W + w)] = 1;
            lp.add_con(row, Rel::Eq, Rat(1));
        }
        for (int l = 0; l < W; ++l)
            for (const auto& r : cells[size_t(pick[size_t(l)])].region.rows) {
                std::vector<Rat> row(size_t(W * W), Rat(0));
                for (int w = 0; w < W; ++w)
                    row[size_t(l * W + w)] = r[size_t(w)] * inst.prior[size_t(w)];
                lp.add_con(row, Rel::Ge, Rat(0));
            }
        std::vector<PreferenceProfile> profiles;
        for (int l = 0; l < W; ++l) profiles.push_back(cells[size_t(pick[size_t(l)])].profile);
        for (const auto& vert : enumerate_vertices(Polytope::of(lp))) {
            std::vector<std::vector<Rat>> gamma(size_t(W),
                                                std::vector<Rat>(size_t(W), Rat(0)));
            for (int l = 0; l < W; ++l)
                for (int w = 0; w < W; ++w) gamma[size_t(l)][size_t(w)] = vert[size_t(l * W + w)];
            auto bmp = solve_bmp(inst, profiles, gamma);
            if (found && bmp.value <= sol.value) continue;
            found = true;
            sol.value = bmp.value;
            sol.policy.signals.clear();
            sol.policy.kernel.clear();
            for (int l = 0; l < W; ++l) {
                bool live = false;
                for (int w = 0; w < W; ++w) live = live || gamma[size_t(l)][size_t(w)] > 0;
                if (!live) continue;
                MetaSignal ms;
                ms.profile = profiles[size_t(l)];
                ms.matching = bmp.matchings[size_t(l)];
                ms.tag = "s" + std::to_string(sol.policy.signals.size() + 1);
                sol.policy.signals.push_back(std::move(ms));
                sol.policy.kernel.push_back(gamma[size_t(l)]);
            }
        }
    };
    auto rec = [&](auto&& self, int depth, int start) -> void {
        if (depth == W) {
            try_multiset();
            return;
        }
        for (int c = start; c < C; ++c) {
            pick[size_t(depth)] = c;
            self(self, depth + 1, c);
        }
    };
    rec(rec, 0, 0);
    if (!found) throw InternalError("small-worlds solver found no feasible policy");
    return sol;
}

}  // namespace psm
