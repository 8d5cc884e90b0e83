#include "psm/matching.hpp"

#include <algorithm>
#include <numeric>

#include "psm/errors.hpp"
#include "psm/lp.hpp"

namespace psm {

void WsmProblem::validate() const {
    int sz = n();
    if (int(profile.of_a.size()) != sz || int(profile.of_b.size()) != sz)
        throw InputError("profile size does not match weight matrix");
    for (const auto& row : weights)
        if (int(row.size()) != sz) throw InputError("weight matrix not square");
    for (int i = 0; i < sz; ++i) {
        profile.of_a[size_t(i)].rank_of(sz);
        profile.of_b[size_t(i)].rank_of(sz);
    }
}

Matching gale_shapley(const PreferenceProfile& prof) {
    if (!prof.strict) throw InputError("deferred acceptance needs strict preferences");
    int n = int(prof.of_a.size());
    if (int(prof.of_b.size()) != n) throw InputError("profile sides differ in size");

    // proposal lists, best first
    std::vector<std::vector<int>> pref(size_t(n), std::vector<int>{});
    for (int i = 0; i < n; ++i) {
        for (const auto& tier : prof.of_a[size_t(i)].tiers) {
            if (tier.size() != 1) throw InputError("deferred acceptance needs strict preferences");
            pref[size_t(i)].push_back(tier[0]);
        }
        if (int(pref[size_t(i)].size()) != n) throw InputError("incomplete preference list");
    }
    std::vector<std::vector<int>> brank(size_t(n), std::vector<int>{});
    for (int j = 0; j < n; ++j) {
        brank[size_t(j)] = prof.of_b[size_t(j)].rank_of(n);
        if (!prof.of_b[size_t(j)].strict()) throw InputError("deferred acceptance needs strict preferences");
    }

    std::vector<int> next(size_t(n), 0), a_of_b(size_t(n), -1), b_of_a(size_t(n), -1);
    std::vector<int> free;
    for (int i = n - 1; i >= 0; --i) free.push_back(i);
    while (!free.empty()) {
        int i = free.back();
        free.pop_back();
        int j = pref[size_t(i)][size_t(next[size_t(i)]++)];
        int cur = a_of_b[size_t(j)];
        if (cur < 0) {
            a_of_b[size_t(j)] = i;
            b_of_a[size_t(i)] = j;
        } else if (brank[size_t(j)][size_t(i)] < brank[size_t(j)][size_t(cur)]) {
            a_of_b[size_t(j)] = i;
            b_of_a[size_t(i)] = j;
            b_of_a[size_t(cur)] = -1;
            free.push_back(cur);
        } else {
            free.push_back(i);
        }
    }
    return Matching{b_of_a};
}

namespace {

// Tiny lexicographic bonus: strictly below the smallest possible gap between
// distinct total weights, and injective over matchings, so the perturbed
// optimum is the lexicographically smallest partner vector among the true
// optima. Digits n - m[i] in base n + 1, most significant for a_0.
std::vector<std::vector<Rat>> lex_perturbed(const std::vector<std::vector<Rat>>& w) {
    int n = int(w.size());
    Int den = 1;
    for (const auto& row : w)
        for (const auto& v : row) den = boost::multiprecision::lcm(den, rat_den(v));
    Int scale = 1;
    for (int k = 0; k < n + 2; ++k) scale *= Int(n + 1);
    Rat delta = Rat(Int(1), 2 * den * scale);

    auto out = w;
    Int pw = 1;
    for (int i = n - 1; i >= 0; --i) {
        for (int j = 0; j < n; ++j) out[size_t(i)][size_t(j)] += delta * Rat(Int(n - j) * pw);
        pw *= Int(n + 1);
    }
    return out;
}

}  // namespace

WsmResult wsm_strict(const WsmProblem& prob) {
    prob.validate();
    if (!prob.profile.strict) throw InputError("wsm_strict needs strict preferences");
    int n = prob.n();
    std::vector<std::vector<int>> ra(size_t(n), std::vector<int>{}),
        rb(size_t(n), std::vector<int>{});
    for (int i = 0; i < n; ++i) {
        if (!prob.profile.of_a[size_t(i)].strict() || !prob.profile.of_b[size_t(i)].strict())
            throw InputError("wsm_strict needs strict preferences");
        ra[size_t(i)] = prob.profile.of_a[size_t(i)].rank_of(n);
        rb[size_t(i)] = prob.profile.of_b[size_t(i)].rank_of(n);
    }

    auto wp = lex_perturbed(prob.weights);
    LinearProgram lp;
    auto var = [&](int i, int j) { return i * n + j; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            lp.add_var("x_" + std::to_string(i) + "_" + std::to_string(j));
    lp.objective.assign(size_t(n * n), Rat(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lp.objective[size_t(var(i, j))] = wp[size_t(i)][size_t(j)];
    for (int i = 0; i < n; ++i) {
        std::vector<Rat> row(size_t(n * n), Rat(0));
        for (int j = 0; j < n; ++j) row[size_t(var(i, j))] = 1;
        lp.add_con(row, Rel::Eq, Rat(1));
    }
    for (int j = 0; j < n; ++j) {
        std::vector<Rat> col(size_t(n * n), Rat(0));
        for (int i = 0; i < n; ++i) col[size_t(var(i, j))] = 1;
        lp.add_con(col, Rel::Eq, Rat(1));
    }
    // stability: (i, j) cannot both strictly gain over everything x assigns
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<Rat> row(size_t(n * n), Rat(0));
            row[size_t(var(i, j))] = 1;
            for (int jj = 0; jj < n; ++jj)
                if (ra[size_t(i)][size_t(jj)] < ra[size_t(i)][size_t(j)])
                    row[size_t(var(i, jj))] += 1;
            for (int ii = 0; ii < n; ++ii)
                if (rb[size_t(j)][size_t(ii)] < rb[size_t(j)][size_t(i)])
                    row[size_t(var(ii, j))] += 1;
            lp.add_con(row, Rel::Ge, Rat(1));
        }

    auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal)
        throw InternalError("stable matching polytope should be a nonempty polytope");
    Matching m;
    m.a_to_b.assign(size_t(n), -1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Rat& x = res.x[size_t(var(i, j))];
            if (x == 1)
                m.a_to_b[size_t(i)] = j;
            else if (x != 0)
                throw InternalError("fractional basic optimum on a strict instance");
        }
    Rat value = 0;
    for (int i = 0; i < n; ++i) {
        if (m.a_to_b[size_t(i)] < 0) throw InternalError("unmatched row in LP optimum");
        value += prob.weights[size_t(i)][size_t(m.a_to_b[size_t(i)])];
    }
    return {m, value};
}

WsmResult wsm_brute(const WsmProblem& prob, int cap) {
    prob.validate();
    int n = prob.n();
    if (n > cap) throw CapacityError("instance too large for exhaustive matching search");

    std::vector<int> perm(size_t(n), 0);
    std::iota(perm.begin(), perm.end(), 0);
    bool found = false;
    WsmResult best;
    do {
        Matching m{perm};
        if (!order_stable(prob.profile, m)) continue;
        Rat value = 0;
        for (int i = 0; i < n; ++i) value += prob.weights[size_t(i)][size_t(perm[size_t(i)])];
        // lexicographic enumeration order makes first strict max the tie-break winner
        if (!found || value > best.value) {
            best = {m, value};
            found = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!found) throw InternalError("no stable matching found by exhaustive search");
    return best;
}

}  // namespace psm
