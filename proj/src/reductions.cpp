#include "psm/reductions.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "psm/errors.hpp"

namespace psm {

namespace {

constexpr int kUnranked = std::numeric_limits<int>::max();

// rank_a[i][j]: 0-based position of b_j in a_i's list; tie members share the
// rank just past the ranked tail; kUnranked = unacceptable.
std::vector<std::vector<int>> smti_ranks(int rows, int cols,
                                         const std::vector<std::vector<int>>& prefs,
                                         const std::vector<std::vector<int>>* ties) {
    std::vector<std::vector<int>> rk(size_t(rows), std::vector<int>(size_t(cols), kUnranked));
    for (int i = 0; i < rows; ++i) {
        const auto& p = prefs[size_t(i)];
        for (size_t k = 0; k < p.size(); ++k) rk[size_t(i)][size_t(p[k])] = int(k);
        if (ties)
            for (int j : (*ties)[size_t(i)]) rk[size_t(i)][size_t(j)] = int(p.size());
    }
    return rk;
}

}  // namespace

void SmtiInstance::validate() const {
    if (na() < 1 || nb() < 1) throw InputError("smti: both sides must be nonempty");
    if (int(prefs_a.size()) != na() || int(ties_a.size()) != na())
        throw InputError("smti: A-side list count mismatch");
    if (int(prefs_b.size()) != nb()) throw InputError("smti: B-side list count mismatch");
    auto check_list = [](const std::vector<int>& lst, int lim, const std::string& who) {
        std::vector<bool> seen(size_t(lim), false);
        for (int y : lst) {
            if (y < 0 || y >= lim)
                throw InputError("smti: agent " + who + " ranks an out-of-range partner");
            if (seen[size_t(y)])
                throw InputError("smti: agent " + who + " ranks a partner twice");
            seen[size_t(y)] = true;
        }
    };
    for (int i = 0; i < na(); ++i) {
        const auto& who = side_a[size_t(i)];
        check_list(prefs_a[size_t(i)], nb(), who);
        const auto& t = ties_a[size_t(i)];
        if (!t.empty() && t.size() != 2)
            throw InputError("smti: agent " + who + " has a tie not of size two");
        if (t.size() == 2 && t[0] == t[1])
            throw InputError("smti: agent " + who + " ties a partner with itself");
        for (int y : t) {
            if (y < 0 || y >= nb())
                throw InputError("smti: agent " + who + " ties an out-of-range partner");
            if (std::find(prefs_a[size_t(i)].begin(), prefs_a[size_t(i)].end(), y) !=
                prefs_a[size_t(i)].end())
                throw InputError("smti: agent " + who + " has a tie overlapping its list");
        }
    }
    for (int j = 0; j < nb(); ++j) check_list(prefs_b[size_t(j)], na(), side_b[size_t(j)]);
}

bool smti_weakly_stable(const SmtiInstance& m, const SmtiMatching& mm) {
    m.validate();
    if (int(mm.a_to_b.size()) != m.na()) throw InputError("smti: matching size mismatch");
    auto ra = smti_ranks(m.na(), m.nb(), m.prefs_a, &m.ties_a);
    auto rb = smti_ranks(m.nb(), m.na(), m.prefs_b, nullptr);
    std::vector<int> b_to_a(size_t(m.nb()), -1);
    for (int i = 0; i < m.na(); ++i) {
        int j = mm.a_to_b[size_t(i)];
        if (j < 0) continue;
        if (j >= m.nb()) throw InputError("smti: matching partner out of range");
        if (b_to_a[size_t(j)] != -1) throw InputError("smti: matching reuses a partner");
        if (ra[size_t(i)][size_t(j)] == kUnranked || rb[size_t(j)][size_t(i)] == kUnranked)
            throw InputError("smti: matching pairs unacceptable partners");
        b_to_a[size_t(j)] = i;
    }
    for (int i = 0; i < m.na(); ++i)
        for (int j = 0; j < m.nb(); ++j) {
            if (ra[size_t(i)][size_t(j)] == kUnranked ||
                rb[size_t(j)][size_t(i)] == kUnranked)
                continue;
            int mi = mm.a_to_b[size_t(i)], mj = b_to_a[size_t(j)];
            bool a_wants = mi < 0 || ra[size_t(i)][size_t(j)] < ra[size_t(i)][size_t(mi)];
            bool b_wants = mj < 0 || rb[size_t(j)][size_t(i)] < rb[size_t(j)][size_t(mj)];
            if (a_wants && b_wants) return false;
        }
    return true;
}

int smti_max_stable_size(const SmtiInstance& m, int cap) {
    m.validate();
    if (m.na() > cap || m.nb() > cap)
        throw CapacityError("smti brute force limited to " + std::to_string(cap) +
                            " agents per side");
    auto ra = smti_ranks(m.na(), m.nb(), m.prefs_a, &m.ties_a);
    auto rb = smti_ranks(m.nb(), m.na(), m.prefs_b, nullptr);
    std::vector<int> a_to_b(size_t(m.na()), -1);
    std::vector<int> b_to_a(size_t(m.nb()), -1);
    std::vector<bool> used(size_t(m.nb()), false);
    int best = -1;
    auto stable = [&] {
        for (int i = 0; i < m.na(); ++i)
            for (int j = 0; j < m.nb(); ++j) {
                if (ra[size_t(i)][size_t(j)] == kUnranked ||
                    rb[size_t(j)][size_t(i)] == kUnranked)
                    continue;
                int mi = a_to_b[size_t(i)], mj = b_to_a[size_t(j)];
                bool a_wants =
                    mi < 0 || ra[size_t(i)][size_t(j)] < ra[size_t(i)][size_t(mi)];
                bool b_wants =
                    mj < 0 || rb[size_t(j)][size_t(i)] < rb[size_t(j)][size_t(mj)];
                if (a_wants && b_wants) return false;
            }
        return true;
    };
    auto rec = [&](auto&& self, int i) -> void {
        if (i == m.na()) {
            if (stable()) {
                int sz = 0;
                for (int x : a_to_b)
                    if (x >= 0) ++sz;
                best = std::max(best, sz);
            }
            return;
        }
        self(self, i + 1);  // i unmatched
        for (int j = 0; j < m.nb(); ++j) {
            if (used[size_t(j)] || ra[size_t(i)][size_t(j)] == kUnranked ||
                rb[size_t(j)][size_t(i)] == kUnranked)
                continue;
            used[size_t(j)] = true;
            a_to_b[size_t(i)] = j;
            b_to_a[size_t(j)] = i;
            self(self, i + 1);
            a_to_b[size_t(i)] = -1;
            b_to_a[size_t(j)] = -1;
            used[size_t(j)] = false;
        }
    };
    rec(rec, 0);
    if (best < 0) throw InternalError("smti brute force found no stable matching");
    return best;
}

SmtiRestrictResult smti_restrict(const SmtiInstance& m) {
    m.validate();
    int na = m.na(), nb = m.nb();
    // owners[i]: A-agents whose tie contains b_i, ascending
    std::vector<std::vector<int>> owners(size_t(nb), std::vector<int>{});
    for (int a = 0; a < na; ++a)
        for (int j : m.ties_a[size_t(a)]) owners[size_t(j)].push_back(a);

    SmtiInstance out;
    // A' = A, then one dummy per (tied b, owner), then the chain dummies
    out.side_a = m.side_a;
    std::vector<std::vector<int>> a2_idx(size_t(nb), std::vector<int>{});
    std::vector<std::vector<int>> a3_idx(size_t(nb), std::vector<int>{});
    for (int i = 0; i < nb; ++i)
        for (int a : owners[size_t(i)]) {
            a2_idx[size_t(i)].push_back(int(out.side_a.size()));
            out.side_a.push_back(m.side_a[size_t(a)] + "~" + m.side_b[size_t(i)]);
        }
    for (int i = 0; i < nb; ++i)
        for (size_t l = 1; l < owners[size_t(i)].size(); ++l) {
            a3_idx[size_t(i)].push_back(int(out.side_a.size()));
            out.side_a.push_back(m.side_b[size_t(i)] + "~x" + std::to_string(l));
        }
    // B' = untied originals, then the per-owner copies, then their shadows
    std::vector<int> b2_idx(size_t(nb), -1);
    std::vector<std::vector<int>> copy_idx(size_t(nb), std::vector<int>{});
    std::vector<std::vector<int>> tilde_idx(size_t(nb), std::vector<int>{});
    for (int i = 0; i < nb; ++i)
        if (owners[size_t(i)].empty()) {
            b2_idx[size_t(i)] = int(out.side_b.size());
            out.side_b.push_back(m.side_b[size_t(i)]);
        }
    for (int i = 0; i < nb; ++i)
        for (int a : owners[size_t(i)]) {
            copy_idx[size_t(i)].push_back(int(out.side_b.size()));
            out.side_b.push_back(m.side_b[size_t(i)] + "~" + m.side_a[size_t(a)]);
        }
    for (int i = 0; i < nb; ++i)
        for (int a : owners[size_t(i)]) {
            tilde_idx[size_t(i)].push_back(int(out.side_b.size()));
            out.side_b.push_back(m.side_b[size_t(i)] + "~" + m.side_a[size_t(a)] + "~d");
        }

    out.prefs_a.assign(out.side_a.size(), {});
    out.prefs_b.assign(out.side_b.size(), {});
    out.ties_a.assign(out.side_a.size(), {});

    // originals: each tied b in a's list expands to the full row of its copies
    for (int a = 0; a < na; ++a) {
        auto& lst = out.prefs_a[size_t(a)];
        for (int j : m.prefs_a[size_t(a)]) {
            if (owners[size_t(j)].empty())
                lst.push_back(b2_idx[size_t(j)]);
            else
                for (int c : copy_idx[size_t(j)]) lst.push_back(c);
        }
        // a's own tie becomes a tie over its own copies of the tied agents
        for (int j : m.ties_a[size_t(a)]) {
            const auto& ow = owners[size_t(j)];
            size_t pos = size_t(std::find(ow.begin(), ow.end(), a) - ow.begin());
            out.ties_a[size_t(a)].push_back(copy_idx[size_t(j)][pos]);
        }
        std::sort(out.ties_a[size_t(a)].begin(), out.ties_a[size_t(a)].end());
    }
    for (int i = 0; i < nb; ++i) {
        if (owners[size_t(i)].empty()) {
            out.prefs_b[size_t(b2_idx[size_t(i)])] = m.prefs_b[size_t(i)];
            continue;
        }
        for (size_t l = 0; l < owners[size_t(i)].size(); ++l) {
            // copy: its guard dummy first, then the original list
            auto& cl = out.prefs_b[size_t(copy_idx[size_t(i)][l])];
            cl.push_back(a2_idx[size_t(i)][l]);
            for (int a : m.prefs_b[size_t(i)]) cl.push_back(a);
            // guard dummy: its shadow first, then its copy
            auto& gl = out.prefs_a[size_t(a2_idx[size_t(i)][l])];
            gl.push_back(tilde_idx[size_t(i)][l]);
            gl.push_back(copy_idx[size_t(i)][l]);
            // shadow: the whole dummy chain, then its guard
            auto& sl = out.prefs_b[size_t(tilde_idx[size_t(i)][l])];
            for (int x : a3_idx[size_t(i)]) sl.push_back(x);
            sl.push_back(a2_idx[size_t(i)][l]);
        }
        // chain dummies: no list, tied between adjacent shadows
        for (size_t l = 0; l + 1 < owners[size_t(i)].size(); ++l) {
            auto& t = out.ties_a[size_t(a3_idx[size_t(i)][l])];
            t.push_back(tilde_idx[size_t(i)][l]);
            t.push_back(tilde_idx[size_t(i)][l + 1]);
            std::sort(t.begin(), t.end());
        }
    }
    out.validate();

    SmtiRestrictResult res;
    res.out = std::move(out);
    for (int i = 0; i < nb; ++i) {
        res.a2 += int(owners[size_t(i)].size());
        res.a3 += std::max(0, int(owners[size_t(i)].size()) - 1);
    }
    return res;
}

WsmProblem smti_to_wsm(const SmtiInstance& m) {
    m.validate();
    if (m.na() != m.nb()) throw InputError("smti: sides must have equal size");
    int n = m.na();
    WsmProblem prob;
    auto ra = smti_ranks(n, n, m.prefs_a, &m.ties_a);
    auto rb = smti_ranks(n, n, m.prefs_b, nullptr);
    // Only mutually acceptable entries survive into the ranked head: a
    // one-sided entry cannot be matched or block, but keeping it above the
    // appended tail would let it shelter its owner from real blocking pairs
    // and change the optimum value.
    bool any_tie = false;
    auto complete = [](const std::vector<int>& ranked, const std::vector<int>& tie,
                       const std::vector<int>& back_rank, int lim) {
        AgentOrder o;
        std::vector<bool> head(size_t(lim), false);
        for (int y : ranked)
            if (back_rank[size_t(y)] != kUnranked) {
                o.tiers.push_back({y});
                head[size_t(y)] = true;
            }
        std::vector<int> kept;
        for (int y : tie)
            if (back_rank[size_t(y)] != kUnranked) {
                kept.push_back(y);
                head[size_t(y)] = true;
            }
        if (!kept.empty()) o.tiers.push_back(kept);
        for (int y = 0; y < lim; ++y)
            if (!head[size_t(y)]) o.tiers.push_back({y});
        return o;
    };
    for (int i = 0; i < n; ++i) {
        std::vector<int> back(size_t(n), kUnranked);
        for (int j = 0; j < n; ++j) back[size_t(j)] = rb[size_t(j)][size_t(i)];
        auto o = complete(m.prefs_a[size_t(i)], m.ties_a[size_t(i)], back, n);
        for (const auto& tier : o.tiers) any_tie = any_tie || tier.size() > 1;
        prob.profile.of_a.push_back(std::move(o));
    }
    for (int j = 0; j < n; ++j) {
        std::vector<int> back(size_t(n), kUnranked);
        for (int i = 0; i < n; ++i) back[size_t(i)] = ra[size_t(i)][size_t(j)];
        prob.profile.of_b.push_back(complete(m.prefs_b[size_t(j)], {}, back, n));
    }
    prob.profile.strict = !any_tie;
    prob.weights.assign(size_t(n), std::vector<Rat>(size_t(n), Rat(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (ra[size_t(i)][size_t(j)] != kUnranked &&
                rb[size_t(j)][size_t(i)] != kUnranked)
                prob.weights[size_t(i)][size_t(j)] = 1;
    prob.validate();
    return prob;
}

namespace {

// 1-based positions counted from the worst tier; a two-tier occupies two slots
std::vector<int> positions_from_worst(const AgentOrder& o, int n) {
    std::vector<int> pos(size_t(n), 0);
    int next = 1;
    for (auto it = o.tiers.rbegin(); it != o.tiers.rend(); ++it) {
        for (int y : *it) pos[size_t(y)] = next;
        next += int(it->size());
    }
    return pos;
}

}  // namespace

Instance wsm_to_private_persuasion(const WsmProblem& w) {
    w.validate();
    int n = w.n();
    std::vector<int> tie_owner(size_t(n), -1);  // tie_owner[j] = the a tying b_j
    for (int i = 0; i < n; ++i) {
        int wide = 0;
        for (const auto& tier : w.profile.of_a[size_t(i)].tiers) {
            if (tier.size() == 1) continue;
            if (tier.size() > 2)
                throw InputError("gadget: tie of " + std::to_string(tier.size()) +
                                 " agents in order of a" + std::to_string(i + 1));
            ++wide;
            for (int j : tier) {
                if (tie_owner[size_t(j)] != -1)
                    throw InputError("gadget: b" + std::to_string(j + 1) +
                                     " appears in two ties");
                tie_owner[size_t(j)] = i;
            }
        }
        if (wide > 1)
            throw InputError("gadget: two ties in order of a" + std::to_string(i + 1));
    }
    for (int j = 0; j < n; ++j)
        if (!w.profile.of_b[size_t(j)].strict())
            throw InputError("gadget: tie in order of b" + std::to_string(j + 1));
    for (const auto& row : w.weights)
        for (const auto& wt : row)
            if (wt < 0 || wt > 1) throw InputError("gadget: weights must lie in [0,1]");

    int N = n + 1;
    Instance inst;
    inst.worlds = {"w1", "w2"};
    inst.prior = {Rat(4, 5), Rat(1, 5)};
    for (int i = 0; i < n; ++i) inst.side_a.push_back("a" + std::to_string(i + 1));
    inst.side_a.push_back("a'");
    for (int j = 0; j < n; ++j) inst.side_b.push_back("b" + std::to_string(j + 1));
    inst.side_b.push_back("b'");
    auto cube = [&] {
        return std::vector<std::vector<std::vector<Rat>>>(
            size_t(N), std::vector<std::vector<Rat>>(size_t(N),
                                                     std::vector<Rat>(2, Rat(0))));
    };
    inst.val_a = cube();
    inst.val_b = cube();
    inst.util = cube();

    for (int i = 0; i < n; ++i) {
        auto pos = positions_from_worst(w.profile.of_a[size_t(i)], n);
        for (const auto& tier : w.profile.of_a[size_t(i)].tiers) {
            if (tier.size() == 2) {
                // world-dependent crossing below the prior; orders in the two
                // worlds realize the two resolutions of the tie
                int j = pos[size_t(tier[0])];
                int lo = std::min(tier[0], tier[1]), hi = std::max(tier[0], tier[1]);
                inst.val_a[size_t(i)][size_t(lo)] = {Rat(j) + Rat(2, 5),
                                                     Rat(j) + Rat(7, 5)};
                inst.val_a[size_t(i)][size_t(hi)] = {Rat(j) + Rat(3, 5),
                                                     Rat(j) - Rat(2, 5)};
            } else {
                int j = tier[0];
                inst.val_a[size_t(i)][size_t(j)] = {Rat(pos[size_t(j)]),
                                                    Rat(pos[size_t(j)])};
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        auto pos = positions_from_worst(w.profile.of_b[size_t(j)], n);
        int x = tie_owner[size_t(j)];
        int jx = x >= 0 ? pos[size_t(x)] : 0;  // all in the upper band when untied
        for (int i = 0; i < n; ++i) {
            if (i == x) {
                inst.val_b[size_t(j)][size_t(i)] = {Rat(2), Rat(0)};
            } else if (pos[size_t(i)] < jx) {
                Rat v = Rat(1, 2) + Rat(pos[size_t(i)], 2 * (n + 1));
                inst.val_b[size_t(j)][size_t(i)] = {v, v};
            } else {
                Rat v = Rat(2) + Rat(pos[size_t(i)] - jx, n + 1);
                inst.val_b[size_t(j)][size_t(i)] = {v, v};
            }
        }
        inst.val_b[size_t(j)][size_t(n)] = {Rat(39, 10), Rat(39, 10)};
    }
    for (int j = 0; j < n; ++j) inst.val_a[size_t(n)][size_t(j)] = {Rat(-1), Rat(1)};
    inst.val_b[size_t(n)][size_t(n)] = {Rat(1), Rat(1)};

    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            Rat u = (i < n && j < n) ? w.weights[size_t(i)][size_t(j)]
                    : (i == n && j == n) ? Rat(0)
                                         : Rat(-n);
            inst.util[size_t(i)][size_t(j)] = {u, u};
        }
    inst.validate();
    return inst;
}

namespace {

// tie pairs show up as the only world-dependent A-side values of the gadget
std::vector<int> gadget_tie_of(const Instance& inst, int i, int n) {
    std::vector<int> tie;
    for (int j = 0; j < n; ++j)
        if (inst.val_a[size_t(i)][size_t(j)][0] != inst.val_a[size_t(i)][size_t(j)][1])
            tie.push_back(j);
    return tie;
}

std::vector<int> ranking_over_prefix(const AgentOrder& o, int n) {
    std::vector<int> r;
    for (const auto& tier : o.tiers)
        for (int y : tier)
            if (y < n) r.push_back(y);
    return r;
}

// strict `o` refines weak `weak`: no strict relation of `weak` is reversed
bool refines(const AgentOrder& o, const AgentOrder& weak, int n) {
    auto rs = o.rank_of(n);
    auto rw = weak.rank_of(n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (rw[size_t(x)] < rw[size_t(y)] && rs[size_t(x)] >= rs[size_t(y)])
                return false;
    return true;
}

}  // namespace

PrivatePolicy build_proof_policy(const Instance& reduced, const Matching& m_star,
                                 const PreferenceProfile& target) {
    reduced.validate();
    int N = reduced.n(), n = N - 1;
    if (n < 1) throw InputError("proof policy: reduced instance too small");
    if (int(m_star.a_to_b.size()) != n)
        throw InputError("proof policy: matching must cover the original side only");
    if (!target.strict || int(target.of_a.size()) != n || int(target.of_b.size()) != n)
        throw InputError("proof policy: target must be a strict profile of the input size");
    for (int i = 0; i < n; ++i)
        if (!target.of_a[size_t(i)].strict() || !target.of_b[size_t(i)].strict())
            throw InputError("proof policy: target orders must be strict");

    PreferenceProfile prior_prof = induced_profile(reduced, reduced.prior);

    // recover the input weak profile: the tie pair is the world-dependent one
    for (int i = 0; i < n; ++i) {
        auto tie = gadget_tie_of(reduced, i, n);
        AgentOrder weak;
        std::vector<bool> tied(size_t(n), false);
        for (int j : tie) tied[size_t(j)] = true;
        bool tie_done = false;
        for (int y : ranking_over_prefix(prior_prof.of_a[size_t(i)], n)) {
            if (!tied[size_t(y)]) {
                weak.tiers.push_back({y});
            } else if (!tie_done) {
                weak.tiers.push_back(tie);
                tie_done = true;
            }
        }
        if (!refines(target.of_a[size_t(i)], weak, n))
            throw InputError("proof policy: target order of " + reduced.side_a[size_t(i)] +
                             " is not a tie-resolution of the induced weak order");
    }
    for (int j = 0; j < n; ++j) {
        AgentOrder want =
            strict_order_from_ranking(ranking_over_prefix(prior_prof.of_b[size_t(j)], n));
        if (target.of_b[size_t(j)] != want)
            throw InputError("proof policy: target order of " + reduced.side_b[size_t(j)] +
                             " must match the prior order");
    }
    if (!order_stable(target, m_star)) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                auto rai = target.of_a[size_t(i)].rank_of(n);
                auto rbj = target.of_b[size_t(j)].rank_of(n);
                auto b2a = m_star.b_to_a();
                if (rai[size_t(j)] < rai[size_t(m_star.a_to_b[size_t(i)])] &&
                    rbj[size_t(i)] < rbj[size_t(b2a[size_t(j)])])
                    throw InputError("proof policy: matching blocked by (" +
                                     reduced.side_a[size_t(i)] + ", " +
                                     reduced.side_b[size_t(j)] + ") under the target");
            }
        throw InputError("proof policy: matching unstable under the target profile");
    }

    // who learns the world: A-agents whose target order disagrees at the
    // prior, plus the spurned tie partner of any tie-matched A-agent
    std::vector<bool> reveal_a(size_t(N), false), reveal_b(size_t(N), false);
    for (int i = 0; i < n; ++i) {
        AgentOrder at_prior =
            strict_order_from_ranking(ranking_over_prefix(prior_prof.of_a[size_t(i)], n));
        if (target.of_a[size_t(i)] != at_prior) reveal_a[size_t(i)] = true;
        auto tie = gadget_tie_of(reduced, i, n);
        int mi = m_star.a_to_b[size_t(i)];
        if (tie.size() == 2 && (mi == tie[0] || mi == tie[1]))
            reveal_b[size_t(mi == tie[0] ? tie[1] : tie[0])] = true;
    }

    Matching m_full;
    m_full.a_to_b = m_star.a_to_b;
    m_full.a_to_b.push_back(n);

    PrivatePolicy pol;
    bool any_reveal = false;
    for (bool r : reveal_a) any_reveal = any_reveal || r;
    for (bool r : reveal_b) any_reveal = any_reveal || r;
    if (!any_reveal) {
        pol.signals.push_back({prior_prof.of_a, prior_prof.of_b, m_full, "mu"});
        pol.kernel = {{Rat(1), Rat(1)}};
        return pol;
    }
    for (int w = 0; w < 2; ++w) {
        Posterior point(2, Rat(0));
        point[size_t(w)] = 1;
        PreferenceProfile truth = induced_profile(reduced, point);
        JointSignal g;
        for (int x = 0; x < N; ++x)
            g.comp_a.push_back(reveal_a[size_t(x)] ? truth.of_a[size_t(x)]
                                                   : prior_prof.of_a[size_t(x)]);
        for (int x = 0; x < N; ++x)
            g.comp_b.push_back(reveal_b[size_t(x)] ? truth.of_b[size_t(x)]
                                                   : prior_prof.of_b[size_t(x)]);
        g.matching = m_full;
        g.tag = reduced.worlds[size_t(w)];
        pol.signals.push_back(std::move(g));
    }
    pol.kernel = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    return pol;
}

void PersuasionInstance::validate() const {
    if (receivers.empty()) throw InputError("persuasion: no receivers");
    if (worlds.empty() || worlds.size() != prior.size())
        throw InputError("persuasion: prior/world size mismatch");
    Rat tot = 0;
    for (const auto& p : prior) {
        if (p < 0) throw InputError("persuasion: negative prior");
        tot += p;
    }
    if (tot != 1) throw InputError("persuasion: prior must sum to 1");
    if (payoff.size() != receivers.size() || sender.size() != receivers.size())
        throw InputError("persuasion: payoff tables must cover every receiver");
    size_t actions = payoff.empty() ? 0 : payoff[0].size();
    if (actions == 0) throw InputError("persuasion: no actions");
    for (size_t i = 0; i < receivers.size(); ++i) {
        if (payoff[i].size() != actions || sender[i].size() != actions)
            throw InputError("persuasion: action count mismatch for receiver " +
                             receivers[i]);
        for (size_t j = 0; j < actions; ++j)
            if (payoff[i][j].size() != worlds.size() || sender[i][j].size() != worlds.size())
                throw InputError("persuasion: world count mismatch for receiver " +
                                 receivers[i]);
    }
    for (size_t i = 0; i < receivers.size(); ++i)
        for (size_t k = i + 1; k < receivers.size(); ++k)
            if (receivers[i] == receivers[k])
                throw InputError("persuasion: duplicate receiver " + receivers[i]);
}

Instance persuasion_to_matching(const PersuasionInstance& pp) {
    pp.validate();
    if (pp.payoff[0].size() != 2) throw InputError("persuasion: exactly two actions required");
    int I = int(pp.receivers.size());
    int W = int(pp.worlds.size());
    int n = 2 * I;
    Instance inst;
    inst.worlds = pp.worlds;
    inst.prior = pp.prior;
    inst.side_a = pp.receivers;
    for (int k = 0; k < I; ++k) inst.side_a.push_back("dummy" + std::to_string(k + 1));
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < 2; ++j)
            inst.side_b.push_back(pp.receivers[size_t(i)] + ":act" + std::to_string(j + 1));
    auto cube = [&] {
        return std::vector<std::vector<std::vector<Rat>>>(
            size_t(n), std::vector<std::vector<Rat>>(size_t(n),
                                                     std::vector<Rat>(size_t(W), Rat(0))));
    };
    inst.val_a = cube();
    inst.val_b = cube();
    inst.util = cube();

    Rat low = pp.payoff[0][0][0];
    for (const auto& acts : pp.payoff)
        for (const auto& ws : acts)
            for (const auto& v : ws) low = std::min(low, v);
    low -= 1;

    for (int i = 0; i < I; ++i)
        for (int b = 0; b < n; ++b) {
            if (b / 2 == i) {
                inst.val_a[size_t(i)][size_t(b)] = pp.payoff[size_t(i)][size_t(b % 2)];
                inst.util[size_t(i)][size_t(b)] = pp.sender[size_t(i)][size_t(b % 2)];
            } else {
                // strictly below every own-copy payoff, distinct per copy
                Rat v = low - Rat(b + 1, n + 1);
                inst.val_a[size_t(i)][size_t(b)].assign(size_t(W), v);
            }
        }
    for (int k = 0; k < I; ++k)
        for (int b = 0; b < n; ++b) {
            // world-independent strict noise keeps the dummies inert
            Rat v = Rat(k * n + b + 1, I * n + n + 1);
            inst.val_a[size_t(I + k)][size_t(b)].assign(size_t(W), v);
        }
    for (int b = 0; b < n; ++b)
        inst.val_b[size_t(b)][size_t(b / 2)].assign(size_t(W), Rat(1));
    inst.validate();
    return inst;
}

}  // namespace psm
