#include "psm/region.hpp"

#include <algorithm>

#include "psm/errors.hpp"
#include "psm/lp.hpp"

namespace psm {

void Region::add_row(std::vector<Rat> row) {
    if (int(row.size()) != W) throw InternalError("region row width mismatch");
    bool zero = std::all_of(row.begin(), row.end(), [](const Rat& v) { return v == 0; });
    if (!zero) rows.push_back(std::move(row));
}

bool Region::contains(const Posterior& p) const { return contains_mass(p); }

bool Region::contains_mass(const std::vector<Rat>& q) const {
    for (const auto& r : rows) {
        Rat s = 0;
        for (int w = 0; w < W; ++w) s += r[size_t(w)] * q[size_t(w)];
        if (s < 0) return false;
    }
    return true;
}

namespace {

LinearProgram simplex_lp(const Region& reg) {
    LinearProgram lp;
    for (int w = 0; w < reg.W; ++w) lp.add_var("q" + std::to_string(w));
    lp.add_con(std::vector<Rat>(size_t(reg.W), Rat(1)), Rel::Eq, Rat(1));
    for (const auto& r : reg.rows) lp.add_con(r, Rel::Ge, Rat(0));
    return lp;
}

}  // namespace

bool Region::nonempty() const { return any_point().has_value(); }

std::optional<Posterior> Region::any_point() const {
    auto res = lp_solve(simplex_lp(*this));
    if (res.status != LpStatus::Optimal) return std::nullopt;
    return res.x;
}

bool Region::superset_of(const Region& other) const {
    LinearProgram lp = simplex_lp(other);
    for (const auto& r : rows) {
        lp.objective = r;
        for (auto& v : lp.objective) v = -v;  // minimize r.q
        auto res = lp_solve(lp);
        if (res.status == LpStatus::Infeasible) return true;  // other empty
        if (res.status != LpStatus::Optimal)
            throw InternalError("region containment probe unbounded");
        if (res.value > 0) return false;  // some point of other violates r
    }
    return true;
}

Region Region::intersect(const Region& other) const {
    Region out = *this;
    for (const auto& r : other.rows) out.add_row(r);
    return out;
}

Region order_region(int W, const std::vector<std::vector<Rat>>& vals,
                    const AgentOrder& o) {
    Region reg = Region::full(W);
    auto diff = [&](int hi, int lo) {
        std::vector<Rat> row(size_t(W), Rat(0));
        for (int w = 0; w < W; ++w)
            row[size_t(w)] = vals[size_t(hi)][size_t(w)] - vals[size_t(lo)][size_t(w)];
        return row;
    };
    for (size_t t = 0; t < o.tiers.size(); ++t) {
        const auto& tier = o.tiers[t];
        for (size_t k = 1; k < tier.size(); ++k) {
            reg.add_row(diff(tier[0], tier[k]));
            reg.add_row(diff(tier[k], tier[0]));
        }
        if (t + 1 < o.tiers.size())
            reg.add_row(diff(tier[0], o.tiers[t + 1][0]));
    }
    return reg;
}

Region above_set_region(int W, const std::vector<std::vector<Rat>>& vals,
                        int partner, const std::vector<bool>& above) {
    Region reg = Region::full(W);
    for (int y = 0; y < int(vals.size()); ++y) {
        if (y == partner) continue;
        std::vector<Rat> row(size_t(W), Rat(0));
        for (int w = 0; w < W; ++w) {
            Rat d = vals[size_t(y)][size_t(w)] - vals[size_t(partner)][size_t(w)];
            row[size_t(w)] = above[size_t(y)] ? d : -d;
        }
        reg.add_row(std::move(row));
    }
    return reg;
}

AgentOrder order_realizing_above_set(int W, const std::vector<std::vector<Rat>>& vals,
                                     int partner, const std::vector<bool>& above,
                                     const Posterior& p) {
    int n = int(vals.size());
    std::vector<Rat> v(size_t(n), Rat(0));
    for (int y = 0; y < n; ++y)
        for (int w = 0; w < W; ++w) v[size_t(y)] += p[size_t(w)] * vals[size_t(y)][size_t(w)];
    // Sort by value; break value ties so that `above` members land strictly
    // before the partner and all others strictly after it.
    auto cls = [&](int y) {
        if (y == partner) return 1;
        return above[size_t(y)] ? 0 : 2;
    };
    std::vector<int> ys(size_t(n), 0);
    for (int y = 0; y < n; ++y) ys[size_t(y)] = y;
    std::sort(ys.begin(), ys.end(), [&](int l, int r) {
        if (v[size_t(l)] != v[size_t(r)]) return v[size_t(l)] > v[size_t(r)];
        if (cls(l) != cls(r)) return cls(l) < cls(r);
        return l < r;
    });
    AgentOrder o = strict_order_from_ranking(ys);
    // sanity: the realized strictly-better set matches `above`
    auto rank = o.rank_of(n);
    for (int y = 0; y < n; ++y) {
        if (y == partner) continue;
        if ((rank[size_t(y)] < rank[size_t(partner)]) != above[size_t(y)])
            throw InternalError("above-set not realizable at the given posterior");
    }
    return o;
}

std::vector<Posterior> cell_vertices(const Region& reg) {
    Polytope poly;
    poly.num_vars = reg.W;
    poly.cons.push_back({std::vector<Rat>(size_t(reg.W), Rat(1)), Rel::Eq, Rat(1)});
    for (const auto& r : reg.rows) poly.cons.push_back({r, Rel::Ge, Rat(0)});
    return enumerate_vertices(poly);
}

std::vector<std::vector<Rat>> agent_values(const Instance& inst, Side side, int x) {
    std::vector<std::vector<Rat>> vals(size_t(inst.n()),
                                       std::vector<Rat>(size_t(inst.num_worlds())));
    for (int y = 0; y < inst.n(); ++y)
        for (int w = 0; w < inst.num_worlds(); ++w)
            vals[size_t(y)][size_t(w)] = inst.value(side, x, y, w);
    return vals;
}

}  // namespace psm
