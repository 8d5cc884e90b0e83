#include "psm/oracle.hpp"

#include <algorithm>
#include <numeric>

#include "psm/errors.hpp"
#include "psm/lp.hpp"
#include "psm/region.hpp"

namespace psm {

namespace {

std::vector<AgentOrder> weak_orders(int n) {
    if (n == 1) return {AgentOrder{{{0}}}};
    // n == 2: two strict orders and the tie
    return {AgentOrder{{{0}, {1}}}, AgentOrder{{{1}, {0}}}, AgentOrder{{{0, 1}}}};
}

std::vector<AgentOrder> strict_orders(int n) {
    std::vector<int> perm(size_t(n), 0);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<AgentOrder> out;
    do {
        AgentOrder o;
        for (int y : perm) o.tiers.push_back({y});
        out.push_back(std::move(o));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::vector<Matching> all_matchings(int n) {
    std::vector<int> perm(size_t(n), 0);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Matching> out;
    do {
        out.push_back(Matching{perm});
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

Region profile_region(const Instance& inst, const PreferenceProfile& prof) {
    int W = inst.num_worlds();
    Region reg = Region::full(W);
    for (Side side : {Side::A, Side::B})
        for (int x = 0; x < inst.n(); ++x)
            reg = reg.intersect(
                order_region(W, agent_values(inst, side, x), prof.of(side, x)));
    return reg;
}

struct Column {
    PreferenceProfile profile;
    Matching matching;
    Posterior vertex;
    Rat coeff;  // per-unit-mass utility at the vertex
};

// one column per (cell vertex, best order-stable matching there)
void columns_of_profile(const Instance& inst, const PreferenceProfile& prof,
                        const Region& reg, const std::vector<Matching>& matchings,
                        std::vector<Column>& out) {
    auto verts = cell_vertices(reg);
    if (verts.empty()) return;
    int W = inst.num_worlds();
    for (const auto& v : verts) {
        bool any = false;
        Column col;
        for (const auto& m : matchings) {
            if (!order_stable(prof, m)) continue;
            Rat val = 0;
            for (int w = 0; w < W; ++w) val += v[size_t(w)] * matching_utility(inst, m, w);
            if (!any || val > col.coeff) {
                any = true;
                col.matching = m;
                col.coeff = val;
            }
        }
        if (!any) continue;
        col.profile = prof;
        col.vertex = v;
        out.push_back(std::move(col));
    }
}

OracleSolution solve_columns(const Instance& inst, const std::vector<Column>& cols) {
    int W = inst.num_worlds();
    LinearProgram lp;
    for (size_t c = 0; c < cols.size(); ++c) {
        lp.add_var("m" + std::to_string(c));
        lp.objective.back() = cols[c].coeff;
    }
    for (int w = 0; w < W; ++w) {
        std::vector<Rat> row(cols.size(), Rat(0));
        for (size_t c = 0; c < cols.size(); ++c) row[c] = cols[c].vertex[size_t(w)];
        lp.add_con(row, Rel::Eq, inst.prior[size_t(w)]);
    }
    auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal)
        throw InternalError("oracle master program did not solve");
    OracleSolution sol;
    sol.value = res.value;
    for (size_t c = 0; c < cols.size(); ++c) {
        if (res.x[c] == 0) continue;
        MetaSignal ms;
        ms.profile = cols[c].profile;
        ms.matching = cols[c].matching;
        ms.tag = "s" + std::to_string(sol.policy.signals.size() + 1);
        std::vector<Rat> krow(size_t(W), Rat(0));
        for (int w = 0; w < W; ++w)
            krow[size_t(w)] = res.x[c] * cols[c].vertex[size_t(w)] / inst.prior[size_t(w)];
        sol.policy.signals.push_back(std::move(ms));
        sol.policy.kernel.push_back(std::move(krow));
    }
    return sol;
}

}  // namespace

OracleSolution solve_oracle_public(const Instance& inst, int n_cap_weak,
                                   int n_cap_strict) {
    inst.validate();
    int n = inst.n(), W = inst.num_worlds();
    if (n > n_cap_strict)
        throw CapacityError("oracle limited to " + std::to_string(n_cap_strict) +
                            " agents per side");
    if (W > 3) throw CapacityError("oracle limited to 3 worlds");
    bool weak = n <= n_cap_weak;
    auto orders = weak ? weak_orders(n) : strict_orders(n);
    auto matchings = all_matchings(n);

    // one slot per agent; intersect regions incrementally and prune dead ends
    std::vector<Column> cols;
    std::vector<size_t> pick(size_t(2 * n), 0);
    auto rec = [&](auto&& self, int slot, const Region& reg) -> void {
        if (slot == 2 * n) {
            PreferenceProfile prof;
            prof.strict = true;
            for (int i = 0; i < n; ++i) prof.of_a.push_back(orders[pick[size_t(i)]]);
            for (int j = 0; j < n; ++j) prof.of_b.push_back(orders[pick[size_t(n + j)]]);
            for (const auto& o : prof.of_a) prof.strict = prof.strict && o.strict();
            for (const auto& o : prof.of_b) prof.strict = prof.strict && o.strict();
            columns_of_profile(inst, prof, reg, matchings, cols);
            return;
        }
        Side side = slot < n ? Side::A : Side::B;
        int x = slot < n ? slot : slot - n;
        auto vals = agent_values(inst, side, x);
        for (size_t k = 0; k < orders.size(); ++k) {
            Region next = reg.intersect(order_region(W, vals, orders[k]));
            if (!next.nonempty()) continue;
            pick[size_t(slot)] = k;
            self(self, slot + 1, next);
        }
    };
    rec(rec, 0, Region::full(W));
    return solve_columns(inst, cols);
}

OracleSolution solve_oracle_restricted(const Instance& inst) {
    inst.validate();
    int n = inst.n(), W = inst.num_worlds();
    if (n > 2) throw CapacityError("restricted oracle limited to 2 agents per side");
    if (W != 2) throw CapacityError("restricted oracle requires exactly 2 worlds");

    auto matchings = all_matchings(n);
    int M = int(matchings.size());
    auto orders = weak_orders(n);

    // candidate cells per matching: weak-order profiles keeping it stable
    std::vector<std::vector<std::pair<PreferenceProfile, Region>>> cand{size_t(M)};
    std::vector<size_t> pick(size_t(2 * n), 0);
    auto rec = [&](auto&& self, int slot) -> void {
        if (slot == 2 * n) {
            PreferenceProfile prof;
            for (int i = 0; i < n; ++i) prof.of_a.push_back(orders[pick[size_t(i)]]);
            for (int j = 0; j < n; ++j) prof.of_b.push_back(orders[pick[size_t(n + j)]]);
            prof.strict = true;
            for (const auto& o : prof.of_a) prof.strict = prof.strict && o.strict();
            for (const auto& o : prof.of_b) prof.strict = prof.strict && o.strict();
            Region reg = profile_region(inst, prof);
            if (!reg.nonempty()) return;
            for (int m = 0; m < M; ++m)
                if (order_stable(prof, matchings[size_t(m)]))
                    cand[size_t(m)].push_back({prof, reg});
            return;
        }
        for (size_t k = 0; k < orders.size(); ++k) {
            pick[size_t(slot)] = k;
            self(self, slot + 1);
        }
    };
    rec(rec, 0);

    // sweep every cell assignment; -1 leaves the matching unused
    OracleSolution best;
    bool found = false;
    std::vector<int> assign(size_t(M), -1);
    auto sweep = [&](auto&& self, int m) -> void {
        if (m == M) {
            LinearProgram lp;  // q(m, w) masses for assigned matchings
            std::vector<int> base(size_t(M), -1);
            for (int k = 0; k < M; ++k) {
                if (assign[size_t(k)] < 0) continue;
                base[size_t(k)] = lp.num_vars;
                for (int w = 0; w < W; ++w) {
                    lp.add_var();
                    lp.objective.back() = matching_utility(inst, matchings[size_t(k)], w);
                }
            }
            if (lp.num_vars == 0) return;
            for (int w = 0; w < W; ++w) {
                std::vector<Rat> row(size_t(lp.num_vars), Rat(0));
                for (int k = 0; k < M; ++k)
                    if (base[size_t(k)] >= 0) row[size_t(base[size_t(k)] + w)] = 1;
                lp.add_con(row, Rel::Eq, inst.prior[size_t(w)]);
            }
            for (int k = 0; k < M; ++k) {
                if (assign[size_t(k)] < 0) continue;
                const auto& reg = cand[size_t(k)][size_t(assign[size_t(k)])].second;
                for (const auto& r : reg.rows) {
                    std::vector<Rat> row(size_t(lp.num_vars), Rat(0));
                    for (int w = 0; w < W; ++w) row[size_t(base[size_t(k)] + w)] = r[size_t(w)];
                    lp.add_con(row, Rel::Ge, Rat(0));
                }
            }
            auto res = lp_solve(lp);
            if (res.status != LpStatus::Optimal) return;
            if (found && res.value <= best.value) return;
            found = true;
            best.value = res.value;
            best.policy.signals.clear();
            best.policy.kernel.clear();
            for (int k = 0; k < M; ++k) {
                if (base[size_t(k)] < 0) continue;
                std::vector<Rat> krow(size_t(W), Rat(0));
                bool live = false;
                for (int w = 0; w < W; ++w) {
                    krow[size_t(w)] = res.x[size_t(base[size_t(k)] + w)] / inst.prior[size_t(w)];
                    live = live || krow[size_t(w)] > 0;
                }
                if (!live) continue;
                MetaSignal ms;
                ms.profile = cand[size_t(k)][size_t(assign[size_t(k)])].first;
                ms.matching = matchings[size_t(k)];
                ms.tag = "m" + std::to_string(k);
                best.policy.signals.push_back(std::move(ms));
                best.policy.kernel.push_back(std::move(krow));
            }
            return;
        }
        for (int c = -1; c < int(cand[size_t(m)].size()); ++c) {
            assign[size_t(m)] = c;
            self(self, m + 1);
        }
    };
    sweep(sweep, 0);
    if (!found) throw InternalError("restricted oracle found no feasible policy");
    return best;
}

}  // namespace psm
