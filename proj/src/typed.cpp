#include "psm/typed.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <set>

#include "psm/errors.hpp"
#include "psm/lp.hpp"
#include "psm/region.hpp"

namespace psm {

Int TypedInstance::n() const {
    Int s = 0;
    for (const auto& v : a_sizes) s += v;
    return s;
}

void TypedInstance::validate() const {
    if (worlds.empty()) throw InputError("instance needs at least one world");
    if (a_types.empty() || b_types.empty()) throw InputError("each side needs a type");
    if (prior.size() != worlds.size()) throw InputError("prior size mismatch");
    Rat tot = 0;
    for (const auto& p : prior) {
        if (p < 0) throw InputError("prior probabilities must be nonnegative");
        tot += p;
    }
    if (tot != 1) throw InputError("prior must sum to exactly 1");
    if (a_sizes.size() != a_types.size() || b_sizes.size() != b_types.size())
        throw InputError("type size list mismatch");
    Int na = 0, nb = 0;
    for (const auto& s : a_sizes) {
        if (s <= 0) throw InputError("type sizes must be positive");
        na += s;
    }
    for (const auto& s : b_sizes) {
        if (s <= 0) throw InputError("type sizes must be positive");
        nb += s;
    }
    if (na != nb) throw InputError("side sizes must balance");
    auto check_cube = [&](const std::vector<std::vector<std::vector<Rat>>>& c, int r, int k) {
        if (int(c.size()) != r) throw InputError("value table shape mismatch");
        for (const auto& row : c) {
            if (int(row.size()) != k) throw InputError("value table shape mismatch");
            for (const auto& cell : row)
                if (cell.size() != worlds.size()) throw InputError("value table shape mismatch");
        }
    };
    check_cube(val_a, ta(), tb());
    check_cube(val_b, tb(), ta());
    check_cube(util, ta(), tb());
}

namespace {

int index_of(const std::vector<std::string>& names, const std::string& id,
             const char* what) {
    for (int i = 0; i < int(names.size()); ++i)
        if (names[size_t(i)] == id) return i;
    throw InputError(std::string("unknown ") + what + ": " + id);
}

}  // namespace

int TypedInstance::a_type_index(const std::string& id) const {
    return index_of(a_types, id, "type");
}
int TypedInstance::b_type_index(const std::string& id) const {
    return index_of(b_types, id, "type");
}
int TypedInstance::world_index(const std::string& id) const {
    return index_of(worlds, id, "world");
}

Prototype prototype_of(const PrototypeMatching& m) {
    Prototype p;
    for (int s = 0; s < int(m.counts.size()); ++s)
        for (int t = 0; t < int(m.counts[size_t(s)].size()); ++t)
            if (m.counts[size_t(s)][size_t(t)] > 0) p.push_back({s, t});
    return p;
}

namespace {

void check_type_cap(const TypedInstance& ti, int cap) {
    if (ti.ta() > cap || ti.tb() > cap)
        throw CapacityError("too many types for the typed solver");
}

// u(M'|w) for every world
std::vector<Rat> matching_utilities(const TypedInstance& ti, const PrototypeMatching& m) {
    std::vector<Rat> u(size_t(ti.num_worlds()), Rat(0));
    for (int s = 0; s < ti.ta(); ++s)
        for (int t = 0; t < ti.tb(); ++t) {
            const Int& c = m.counts[size_t(s)][size_t(t)];
            if (c == 0) continue;
            for (int w = 0; w < ti.num_worlds(); ++w)
                u[size_t(w)] += Rat(c) * ti.util[size_t(s)][size_t(t)][size_t(w)];
        }
    return u;
}

// Unique feasible filling of a forest edge set by leaf peeling; nullopt when
// some marginal cannot be met nonnegatively.
std::optional<PrototypeMatching> solve_forest(const TypedInstance& ti,
                                              const std::vector<std::pair<int, int>>& edges) {
    int ta = ti.ta(), tb = ti.tb();
    std::vector<Int> rem_a = ti.a_sizes, rem_b = ti.b_sizes;
    std::vector<int> deg_a(size_t(ta), 0), deg_b(size_t(tb), 0);
    for (auto [s, t] : edges) {
        ++deg_a[size_t(s)];
        ++deg_b[size_t(t)];
    }
    for (int s = 0; s < ta; ++s)
        if (deg_a[size_t(s)] == 0) return std::nullopt;
    for (int t = 0; t < tb; ++t)
        if (deg_b[size_t(t)] == 0) return std::nullopt;

    PrototypeMatching m;
    m.counts.assign(size_t(ta), std::vector<Int>(size_t(tb), Int(0)));
    std::vector<bool> used(edges.size(), false);
    size_t remaining = edges.size();
    while (remaining > 0) {
        bool progressed = false;
        for (size_t e = 0; e < edges.size(); ++e) {
            if (used[e]) continue;
            auto [s, t] = edges[e];
            Int val;
            if (deg_a[size_t(s)] == 1)
                val = rem_a[size_t(s)];
            else if (deg_b[size_t(t)] == 1)
                val = rem_b[size_t(t)];
            else
                continue;
            if (val < 0) return std::nullopt;
            m.counts[size_t(s)][size_t(t)] = val;
            rem_a[size_t(s)] -= val;
            rem_b[size_t(t)] -= val;
            --deg_a[size_t(s)];
            --deg_b[size_t(t)];
            used[e] = true;
            --remaining;
            progressed = true;
        }
        if (!progressed) throw InternalError("forest peeling stalled on a cycle");
    }
    for (const auto& r : rem_a)
        if (r != 0) return std::nullopt;
    for (const auto& r : rem_b)
        if (r != 0) return std::nullopt;
    for (const auto& row : m.counts)
        for (const auto& c : row)
            if (c < 0) return std::nullopt;
    return m;
}

}  // namespace

std::vector<PrototypeMatching> vertex_set(const TypedInstance& ti, const Prototype& p,
                                          int type_cap) {
    check_type_cap(ti, type_cap);
    int ta = ti.ta(), tb = ti.tb();
    Polytope poly;
    poly.num_vars = int(p.size());
    for (int s = 0; s < ta; ++s) {
        std::vector<Rat> row(p.size(), Rat(0));
        for (size_t e = 0; e < p.size(); ++e)
            if (p[e].first == s) row[e] = 1;
        poly.cons.push_back({row, Rel::Eq, Rat(ti.a_sizes[size_t(s)])});
    }
    for (int t = 0; t < tb; ++t) {
        std::vector<Rat> row(p.size(), Rat(0));
        for (size_t e = 0; e < p.size(); ++e)
            if (p[e].second == t) row[e] = 1;
        poly.cons.push_back({row, Rel::Eq, Rat(ti.b_sizes[size_t(t)])});
    }
    auto verts = enumerate_vertices(poly, 26);
    std::vector<PrototypeMatching> out;
    for (const auto& v : verts) {
        PrototypeMatching m;
        m.counts.assign(size_t(ta), std::vector<Int>(size_t(tb), Int(0)));
        for (size_t e = 0; e < p.size(); ++e) {
            if (rat_den(v[e]) != 1)
                throw InternalError("fractional vertex of an integral transportation polytope");
            m.counts[size_t(p[e].first)][size_t(p[e].second)] = rat_num(v[e]);
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<PrototypeMatching> vertex_union(const TypedInstance& ti, int type_cap) {
    check_type_cap(ti, type_cap);
    int ta = ti.ta(), tb = ti.tb();
    std::vector<std::pair<int, int>> all_edges;
    for (int s = 0; s < ta; ++s)
        for (int t = 0; t < tb; ++t) all_edges.push_back({s, t});

    // Vertices are exactly the feasible fillings of acyclic supports, so walk
    // all forests of the complete type bipartite graph.
    std::set<PrototypeMatching> found;
    std::vector<std::pair<int, int>> chosen;
    std::vector<int> parent(size_t(ta + tb), 0);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[size_t(x)] != x) x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
        return x;
    };
    int max_edges = ta + tb - 1;
    std::function<void(size_t)> dfs = [&](size_t from) {
        if (int(chosen.size()) >= std::max(ta, tb)) {
            if (auto m = solve_forest(ti, chosen)) found.insert(*m);
        }
        if (int(chosen.size()) == max_edges) return;
        for (size_t e = from; e < all_edges.size(); ++e) {
            auto [s, t] = all_edges[e];
            int rs = find(s), rt = find(ta + t);
            if (rs == rt) continue;  // cycle
            auto saved = parent;
            parent[size_t(rs)] = rt;
            chosen.push_back(all_edges[e]);
            dfs(e + 1);
            chosen.pop_back();
            parent = saved;
        }
    };
    dfs(0);
    return {found.begin(), found.end()};
}

std::pair<PrototypeMatching, Rat> best_prototype_substitute(
    const TypedInstance& ti, const Prototype& p, const std::vector<Rat>& q) {
    if (int(q.size()) != ti.num_worlds()) throw InputError("mass vector size mismatch");
    LinearProgram lp;
    for (size_t e = 0; e < p.size(); ++e) {
        auto [s, t] = p[e];
        Rat coeff = 0;
        for (int w = 0; w < ti.num_worlds(); ++w)
            coeff += q[size_t(w)] * ti.util[size_t(s)][size_t(t)][size_t(w)];
        lp.add_var("x" + std::to_string(e));
        lp.objective.back() = coeff;
    }
    for (int s = 0; s < ti.ta(); ++s) {
        std::vector<Rat> row(p.size(), Rat(0));
        for (size_t e = 0; e < p.size(); ++e)
            if (p[e].first == s) row[e] = 1;
        lp.add_con(row, Rel::Eq, Rat(ti.a_sizes[size_t(s)]));
    }
    for (int t = 0; t < ti.tb(); ++t) {
        std::vector<Rat> row(p.size(), Rat(0));
        for (size_t e = 0; e < p.size(); ++e)
            if (p[e].second == t) row[e] = 1;
        lp.add_con(row, Rel::Eq, Rat(ti.b_sizes[size_t(t)]));
    }
    auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal)
        throw InputError("prototype cannot carry the declared type sizes");
    PrototypeMatching m;
    m.counts.assign(size_t(ti.ta()), std::vector<Int>(size_t(ti.tb()), Int(0)));
    for (size_t e = 0; e < p.size(); ++e) {
        if (rat_den(res.x[e]) != 1)
            throw InternalError("fractional optimum of an integral transportation polytope");
        m.counts[size_t(p[e].first)][size_t(p[e].second)] = rat_num(res.x[e]);
    }
    return {m, res.value};
}

namespace {

// blocking pair of types under strict type-level orders
bool typed_order_stable(const std::vector<std::vector<int>>& rank_a,
                        const std::vector<std::vector<int>>& rank_b,
                        const PrototypeMatching& m) {
    int ta = int(rank_a.size()), tb = int(rank_b.size());
    for (int s = 0; s < ta; ++s)
        for (int t = 0; t < tb; ++t) {
            bool s_gains = false, t_gains = false;
            for (int t2 = 0; t2 < tb && !s_gains; ++t2)
                if (m.counts[size_t(s)][size_t(t2)] > 0 &&
                    rank_a[size_t(s)][size_t(t)] < rank_a[size_t(s)][size_t(t2)])
                    s_gains = true;
            for (int s2 = 0; s2 < ta && !t_gains; ++s2)
                if (m.counts[size_t(s2)][size_t(t)] > 0 &&
                    rank_b[size_t(t)][size_t(s)] < rank_b[size_t(t)][size_t(s2)])
                    t_gains = true;
            if (s_gains && t_gains) return false;
        }
    return true;
}

struct JointCell {
    std::vector<AgentOrder> oa, ob;
    Region region;
};

// all strict type-level profiles whose weak-inequality cells meet the simplex
std::vector<JointCell> enumerate_joint_cells(const TypedInstance& ti) {
    int W = ti.num_worlds();
    std::vector<JointCell> out;
    std::vector<AgentOrder> oa(size_t(ti.ta())), ob(size_t(ti.tb()));
    std::function<void(int, const Region&)> rec = [&](int slot, const Region& reg) {
        if (slot == ti.ta() + ti.tb()) {
            out.push_back({oa, ob, reg});
            return;
        }
        bool a_side = slot < ti.ta();
        int x = a_side ? slot : slot - ti.ta();
        const auto& vals = a_side ? ti.val_a[size_t(x)] : ti.val_b[size_t(x)];
        int opp = a_side ? ti.tb() : ti.ta();
        std::vector<int> ranking(size_t(opp), 0);
        std::iota(ranking.begin(), ranking.end(), 0);
        do {
            AgentOrder o = strict_order_from_ranking(ranking);
            Region next = reg.intersect(order_region(W, vals, o));
            if (!next.nonempty()) continue;
            (a_side ? oa[size_t(x)] : ob[size_t(x)]) = o;
            rec(slot + 1, next);
        } while (std::next_permutation(ranking.begin(), ranking.end()));
    };
    rec(0, Region::full(W));
    return out;
}

// kernel row from a column's mass vector; zero-prior worlds patched later
std::vector<Rat> kernel_from_mass(const TypedInstance& ti, const std::vector<Rat>& q) {
    std::vector<Rat> row(size_t(ti.num_worlds()), Rat(0));
    for (int w = 0; w < ti.num_worlds(); ++w)
        if (ti.prior[size_t(w)] != 0) row[size_t(w)] = q[size_t(w)] / ti.prior[size_t(w)];
    return row;
}

void patch_zero_prior_worlds(const TypedInstance& ti, TypedPolicy& tp) {
    if (tp.kernel.empty()) return;
    for (int w = 0; w < ti.num_worlds(); ++w) {
        if (ti.prior[size_t(w)] != 0) continue;
        tp.kernel[0][size_t(w)] = 1;
    }
}

}  // namespace

TypedPolicy solve_public_typed(const TypedInstance& ti, int type_cap) {
    ti.validate();
    check_type_cap(ti, type_cap);
    int W = ti.num_worlds();
    auto vstar = vertex_union(ti, type_cap);
    std::vector<std::vector<Rat>> um;  // per matching, per world utility
    for (const auto& m : vstar) um.push_back(matching_utilities(ti, m));

    auto cells = enumerate_joint_cells(ti);

    struct Column {
        int cell;
        Posterior vertex;
        int matching;
        Rat coeff;
    };
    std::vector<Column> cols;
    for (size_t c = 0; c < cells.size(); ++c) {
        std::vector<std::vector<int>> rank_a, rank_b;
        for (const auto& o : cells[c].oa) rank_a.push_back(o.rank_of(ti.tb()));
        for (const auto& o : cells[c].ob) rank_b.push_back(o.rank_of(ti.ta()));
        std::vector<int> stable;
        for (size_t m = 0; m < vstar.size(); ++m)
            if (typed_order_stable(rank_a, rank_b, vstar[m])) stable.push_back(int(m));
        if (stable.empty()) continue;
        for (const auto& v : cell_vertices(cells[c].region)) {
            int best = stable[0];
            Rat best_val;
            bool first = true;
            for (int m : stable) {
                Rat val = 0;
                for (int w = 0; w < W; ++w) val += v[size_t(w)] * um[size_t(m)][size_t(w)];
                if (first || val > best_val) {
                    best = m;
                    best_val = val;
                    first = false;
                }
            }
            cols.push_back({int(c), v, best, best_val});
        }
    }

    // one scalar per column: how much posterior mass sits on that vertex
    LinearProgram lp;
    for (size_t k = 0; k < cols.size(); ++k) {
        lp.add_var("m" + std::to_string(k));
        lp.objective.back() = cols[k].coeff;
    }
    for (int w = 0; w < W; ++w) {
        std::vector<Rat> row(cols.size(), Rat(0));
        for (size_t k = 0; k < cols.size(); ++k) row[k] = cols[k].vertex[size_t(w)];
        lp.add_con(row, Rel::Eq, ti.prior[size_t(w)]);
    }
    auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal)
        throw InternalError("type-level policy LP must be solvable");

    TypedPolicy tp;
    tp.is_private = false;
    tp.value = res.value;
    for (size_t k = 0; k < cols.size(); ++k) {
        if (res.x[k] == 0) continue;
        std::vector<Rat> mass(size_t(W), Rat(0));
        for (int w = 0; w < W; ++w) mass[size_t(w)] = res.x[k] * cols[k].vertex[size_t(w)];
        TypedMetaSignal sig;
        sig.order_a = cells[size_t(cols[k].cell)].oa;
        sig.order_b = cells[size_t(cols[k].cell)].ob;
        sig.matching = vstar[size_t(cols[k].matching)];
        sig.tag = "s" + std::to_string(tp.signals.size());
        tp.signals.push_back(std::move(sig));
        tp.kernel.push_back(kernel_from_mass(ti, mass));
    }
    patch_zero_prior_worlds(ti, tp);
    return tp;
}

namespace {

struct Option {
    std::vector<bool> above;
    Region region;
};

std::vector<Option> subtype_options(int W, const std::vector<std::vector<Rat>>& vals,
                                    int partner) {
    int opp = int(vals.size());
    std::vector<Option> opts;
    for (int mask = 0; mask < (1 << opp); ++mask) {
        if (mask & (1 << partner)) continue;
        std::vector<bool> above(size_t(opp), false);
        for (int y = 0; y < opp; ++y) above[size_t(y)] = (mask >> y) & 1;
        Region reg = above_set_region(W, vals, partner, above);
        if (!reg.nonempty()) continue;
        opts.push_back({above, reg});
    }
    // prefer options that block less and cover more posteriors
    std::vector<bool> drop(opts.size(), false);
    for (size_t i = 0; i < opts.size(); ++i)
        for (size_t j = 0; j < opts.size(); ++j) {
            if (i == j || drop[j]) continue;
            bool subset = true;
            for (size_t y = 0; y < opts[i].above.size() && subset; ++y)
                if (opts[j].above[y] && !opts[i].above[y]) subset = false;
            if (!subset || opts[i].above == opts[j].above) continue;
            if (opts[j].region.superset_of(opts[i].region)) {
                drop[i] = true;
                break;
            }
        }
    std::vector<Option> kept;
    for (size_t i = 0; i < opts.size(); ++i)
        if (!drop[i]) kept.push_back(std::move(opts[i]));
    return kept;
}

}  // namespace

TypedPolicy solve_private_typed(const TypedInstance& ti, int type_cap) {
    ti.validate();
    check_type_cap(ti, type_cap);
    int W = ti.num_worlds();
    auto vstar = vertex_union(ti, type_cap);

    struct SubtypeSlot {
        bool a_side;
        int own, partner;
        std::vector<Option> opts;
    };
    struct MatchingBlock {
        int matching;
        std::vector<Rat> um;
        std::vector<SubtypeSlot> slots;
        std::vector<std::vector<int>> columns;  // option index per slot
    };
    std::vector<MatchingBlock> blocks;
    size_t total_cols = 0;
    for (size_t m = 0; m < vstar.size(); ++m) {
        MatchingBlock blk;
        blk.matching = int(m);
        blk.um = matching_utilities(ti, vstar[m]);
        for (int s = 0; s < ti.ta(); ++s)
            for (int t = 0; t < ti.tb(); ++t) {
                if (vstar[m].counts[size_t(s)][size_t(t)] == 0) continue;
                blk.slots.push_back(
                    {true, s, t, subtype_options(W, ti.val_a[size_t(s)], t)});
                blk.slots.push_back(
                    {false, t, s, subtype_options(W, ti.val_b[size_t(t)], s)});
            }
        // cross product of per-subtype options, dropping unstable combinations
        std::vector<int> choice(blk.slots.size(), 0);
        std::function<void(size_t)> rec = [&](size_t k) {
            if (k == blk.slots.size()) {
                blk.columns.push_back(choice);
                return;
            }
            for (int o = 0; o < int(blk.slots[k].opts.size()); ++o) {
                choice[k] = o;
                // a pair blocks when each side's subtype ranks the other's
                // type strictly above its own partner type
                bool ok = true;
                for (size_t j = 0; j < k && ok; ++j) {
                    const auto& x = blk.slots[j];
                    const auto& y = blk.slots[k];
                    if (x.a_side == y.a_side) continue;
                    const auto& ax = x.opts[size_t(choice[j])].above;
                    const auto& ay = y.opts[size_t(choice[k])].above;
                    if (ax[size_t(y.own)] && ay[size_t(x.own)]) ok = false;
                }
                if (ok) rec(k + 1);
            }
        };
        rec(0);
        total_cols += blk.columns.size();
        if (total_cols > 200000)
            throw CapacityError("private typed column space too large");
        blocks.push_back(std::move(blk));
    }

    // master LP: q(col, w) >= 0; per-world totals hit the prior; per group
    // (matching, subtype, option) the aggregated mass obeys the option region
    struct ColRef {
        size_t block, idx;
    };
    std::vector<ColRef> refs;
    for (size_t b = 0; b < blocks.size(); ++b)
        for (size_t c = 0; c < blocks[b].columns.size(); ++c) refs.push_back({b, c});
    size_t nv = refs.size() * size_t(W);
    auto var = [&](size_t col, int w) { return col * size_t(W) + size_t(w); };

    LinearProgram lp;
    lp.num_vars = int(nv);
    lp.objective.assign(nv, Rat(0));
    for (size_t col = 0; col < refs.size(); ++col) {
        const auto& blk = blocks[refs[col].block];
        for (int w = 0; w < W; ++w) lp.objective[var(col, w)] = blk.um[size_t(w)];
    }
    for (int w = 0; w < W; ++w) {
        std::vector<Rat> row(nv, Rat(0));
        for (size_t col = 0; col < refs.size(); ++col) row[var(col, w)] = 1;
        lp.add_con(row, Rel::Eq, ti.prior[size_t(w)]);
    }
    for (size_t b = 0; b < blocks.size(); ++b) {
        const auto& blk = blocks[b];
        for (size_t k = 0; k < blk.slots.size(); ++k) {
            for (int o = 0; o < int(blk.slots[k].opts.size()); ++o) {
                std::vector<size_t> members;
                for (size_t col = 0; col < refs.size(); ++col)
                    if (refs[col].block == b && blk.columns[refs[col].idx][k] == o)
                        members.push_back(col);
                if (members.empty()) continue;
                for (const auto& r : blk.slots[k].opts[size_t(o)].region.rows) {
                    std::vector<Rat> row(nv, Rat(0));
                    for (size_t col : members)
                        for (int w = 0; w < W; ++w) row[var(col, w)] = r[size_t(w)];
                    lp.add_con(row, Rel::Ge, Rat(0));
                }
            }
        }
    }
    auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal)
        throw InternalError("private typed policy LP must be solvable");

    TypedPolicy tp;
    tp.is_private = true;
    tp.value = res.value;
    for (size_t col = 0; col < refs.size(); ++col) {
        bool live = false;
        for (int w = 0; w < W; ++w)
            if (res.x[var(col, w)] != 0) live = true;
        if (!live) continue;
        const auto& blk = blocks[refs[col].block];
        const auto& choice = blk.columns[refs[col].idx];
        TypedMetaSignal sig;
        sig.matching = vstar[size_t(blk.matching)];
        sig.tag = "s" + std::to_string(tp.signals.size());
        for (size_t k = 0; k < blk.slots.size(); ++k) {
            const auto& slot = blk.slots[k];
            // aggregate over the signals this subtype cannot tell apart
            std::vector<Rat> agg(size_t(W), Rat(0));
            for (size_t c2 = 0; c2 < refs.size(); ++c2) {
                if (refs[c2].block != refs[col].block) continue;
                if (blk.columns[refs[c2].idx][k] != choice[k]) continue;
                for (int w = 0; w < W; ++w) agg[size_t(w)] += res.x[var(c2, w)];
            }
            Rat tot = 0;
            for (const auto& v : agg) tot += v;
            if (tot == 0) throw InternalError("live column with empty pooled mass");
            Posterior p(size_t(W), Rat(0));
            for (int w = 0; w < W; ++w) p[size_t(w)] = agg[size_t(w)] / tot;
            const auto& vals = slot.a_side ? ti.val_a[size_t(slot.own)]
                                           : ti.val_b[size_t(slot.own)];
            AgentOrder o = order_realizing_above_set(
                W, vals, slot.partner, blk.slots[k].opts[size_t(choice[k])].above, p);
            if (slot.a_side)
                sig.comp_a[{slot.own, slot.partner}] = o;
            else
                sig.comp_b[{slot.own, slot.partner}] = o;
        }
        std::vector<Rat> mass(size_t(W), Rat(0));
        for (int w = 0; w < W; ++w) mass[size_t(w)] = res.x[var(col, w)];
        tp.signals.push_back(std::move(sig));
        tp.kernel.push_back(kernel_from_mass(ti, mass));
    }
    patch_zero_prior_worlds(ti, tp);
    return tp;
}

namespace {

std::string agent_name(const std::string& type, const Int& k) {
    return type + "_" + k.str();
}

// type tiers become agent tiers: same-type agents share identical values
AgentOrder expand_order(const AgentOrder& o, const std::vector<std::vector<int>>& members) {
    AgentOrder out;
    for (const auto& tier : o.tiers) {
        std::vector<int> t;
        for (int ty : tier)
            for (int agent : members[size_t(ty)]) t.push_back(agent);
        out.tiers.push_back(std::move(t));
    }
    return out;
}

}  // namespace

Instance expand_typed_instance(const TypedInstance& ti, Int agent_cap) {
    ti.validate();
    if (ti.n() > agent_cap) throw CapacityError("too many concrete agents to materialize");
    Instance inst;
    inst.worlds = ti.worlds;
    inst.prior = ti.prior;
    std::vector<int> type_of_a, type_of_b;
    for (int s = 0; s < ti.ta(); ++s)
        for (Int k = 1; k <= ti.a_sizes[size_t(s)]; ++k) {
            inst.side_a.push_back(agent_name(ti.a_types[size_t(s)], k));
            type_of_a.push_back(s);
        }
    for (int t = 0; t < ti.tb(); ++t)
        for (Int k = 1; k <= ti.b_sizes[size_t(t)]; ++k) {
            inst.side_b.push_back(agent_name(ti.b_types[size_t(t)], k));
            type_of_b.push_back(t);
        }
    int n = int(inst.side_a.size());
    for (int i = 0; i < n; ++i) {
        inst.val_a.push_back({});
        inst.util.push_back({});
        for (int j = 0; j < n; ++j) {
            inst.val_a.back().push_back(
                ti.val_a[size_t(type_of_a[size_t(i)])][size_t(type_of_b[size_t(j)])]);
            inst.util.back().push_back(
                ti.util[size_t(type_of_a[size_t(i)])][size_t(type_of_b[size_t(j)])]);
        }
    }
    for (int j = 0; j < n; ++j) {
        inst.val_b.push_back({});
        for (int i = 0; i < n; ++i)
            inst.val_b.back().push_back(
                ti.val_b[size_t(type_of_b[size_t(j)])][size_t(type_of_a[size_t(i)])]);
    }
    inst.validate();
    return inst;
}

ExpandedPolicy expand_typed_policy(const TypedInstance& ti, const TypedPolicy& tp,
                                   Int agent_cap) {
    ExpandedPolicy out;
    out.instance = expand_typed_instance(ti, agent_cap);
    out.is_private = tp.is_private;
    int n = int(out.instance.side_a.size());

    std::vector<std::vector<int>> a_members(size_t(ti.ta())), b_members(size_t(ti.tb()));
    {
        int idx = 0;
        for (int s = 0; s < ti.ta(); ++s)
            for (Int k = 1; k <= ti.a_sizes[size_t(s)]; ++k) a_members[size_t(s)].push_back(idx++);
        idx = 0;
        for (int t = 0; t < ti.tb(); ++t)
            for (Int k = 1; k <= ti.b_sizes[size_t(t)]; ++k) b_members[size_t(t)].push_back(idx++);
    }

    for (size_t sidx = 0; sidx < tp.signals.size(); ++sidx) {
        const TypedMetaSignal& sig = tp.signals[sidx];
        // canonical slot assignment: agents of each type in index order fill
        // partner types in type order
        Matching m;
        m.a_to_b.assign(size_t(n), -1);
        std::vector<size_t> next_a(size_t(ti.ta()), 0), next_b(size_t(ti.tb()), 0);
        std::vector<int> partner_type_a(size_t(n), -1), partner_type_b(size_t(n), -1);
        for (int s = 0; s < ti.ta(); ++s)
            for (int t = 0; t < ti.tb(); ++t) {
                for (Int c = 0; c < sig.matching.counts[size_t(s)][size_t(t)]; ++c) {
                    int i = a_members[size_t(s)][next_a[size_t(s)]++];
                    int j = b_members[size_t(t)][next_b[size_t(t)]++];
                    m.a_to_b[size_t(i)] = j;
                    partner_type_a[size_t(i)] = t;
                    partner_type_b[size_t(j)] = s;
                }
            }
        for (int i = 0; i < n; ++i)
            if (m.a_to_b[size_t(i)] < 0)
                throw InputError("typed policy matching does not cover the type sizes");

        if (!tp.is_private) {
            MetaSignal ms;
            ms.tag = sig.tag;
            ms.matching = m;
            for (int i = 0; i < n; ++i) {
                int s = -1;
                for (int ty = 0; ty < ti.ta(); ++ty)
                    if (std::find(a_members[size_t(ty)].begin(), a_members[size_t(ty)].end(),
                                  i) != a_members[size_t(ty)].end())
                        s = ty;
                ms.profile.of_a.push_back(expand_order(sig.order_a.at(size_t(s)), b_members));
            }
            for (int j = 0; j < n; ++j) {
                int t = -1;
                for (int ty = 0; ty < ti.tb(); ++ty)
                    if (std::find(b_members[size_t(ty)].begin(), b_members[size_t(ty)].end(),
                                  j) != b_members[size_t(ty)].end())
                        t = ty;
                ms.profile.of_b.push_back(expand_order(sig.order_b.at(size_t(t)), a_members));
            }
            ms.profile.strict = false;
            out.pub.signals.push_back(std::move(ms));
            out.pub.kernel.push_back(tp.kernel[sidx]);
        } else {
            JointSignal js;
            js.tag = sig.tag;
            js.matching = m;
            for (int i = 0; i < n; ++i) {
                int s = -1;
                for (int ty = 0; ty < ti.ta(); ++ty)
                    if (std::find(a_members[size_t(ty)].begin(), a_members[size_t(ty)].end(),
                                  i) != a_members[size_t(ty)].end())
                        s = ty;
                auto it = sig.comp_a.find({s, partner_type_a[size_t(i)]});
                if (it == sig.comp_a.end())
                    throw InputError("typed policy misses a subtype component");
                js.comp_a.push_back(expand_order(it->second, b_members));
            }
            for (int j = 0; j < n; ++j) {
                int t = -1;
                for (int ty = 0; ty < ti.tb(); ++ty)
                    if (std::find(b_members[size_t(ty)].begin(), b_members[size_t(ty)].end(),
                                  j) != b_members[size_t(ty)].end())
                        t = ty;
                auto it = sig.comp_b.find({t, partner_type_b[size_t(j)]});
                if (it == sig.comp_b.end())
                    throw InputError("typed policy misses a subtype component");
                js.comp_b.push_back(expand_order(it->second, a_members));
            }
            out.priv.signals.push_back(std::move(js));
            out.priv.kernel.push_back(tp.kernel[sidx]);
        }
    }
    return out;
}

}  // namespace psm
