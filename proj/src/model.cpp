#include "psm/model.hpp"

#include <algorithm>
#include <map>

#include "psm/errors.hpp"
#include "psm/lp.hpp"

namespace psm {

bool AgentOrder::strict() const {
    for (const auto& t : tiers)
        if (t.size() != 1) return false;
    return true;
}

std::vector<int> AgentOrder::rank_of(int n) const {
    std::vector<int> r(size_t(n), -1);
    for (size_t t = 0; t < tiers.size(); ++t)
        for (int y : tiers[t]) {
            if (y < 0 || y >= n || r[size_t(y)] != -1)
                throw InputError("order is not a partition of the opposite side");
            r[size_t(y)] = int(t);
        }
    for (int y = 0; y < n; ++y)
        if (r[size_t(y)] == -1)
            throw InputError("order is not a partition of the opposite side");
    return r;
}

AgentOrder strict_order_from_ranking(const std::vector<int>& best_first) {
    AgentOrder o;
    for (int y : best_first) o.tiers.push_back({y});
    return o;
}

std::vector<int> Matching::b_to_a() const {
    std::vector<int> inv(a_to_b.size(), -1);
    for (size_t i = 0; i < a_to_b.size(); ++i) {
        int j = a_to_b[i];
        if (j < 0 || j >= int(a_to_b.size()) || inv[size_t(j)] != -1)
            throw InputError("matching is not a bijection");
        inv[size_t(j)] = int(i);
    }
    return inv;
}

int Matching::partner(Side s, int i) const {
    if (s == Side::A) return a_to_b[size_t(i)];
    return b_to_a()[size_t(i)];
}

int Instance::agent_index(Side s, const std::string& id) const {
    const auto& v = s == Side::A ? side_a : side_b;
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i] == id) return int(i);
    throw InputError("unknown agent id: '" + id + "'");
}

int Instance::world_index(const std::string& id) const {
    for (size_t w = 0; w < worlds.size(); ++w)
        if (worlds[w] == id) return int(w);
    throw InputError("unknown world id: '" + id + "'");
}

void Instance::validate() const {
    int W = num_worlds(), N = n();
    if (N < 1) throw InputError("instance needs at least one agent per side");
    if (int(side_b.size()) != N) throw InputError("sides must have equal length");
    if (int(prior.size()) != W) throw InputError("prior size mismatch");
    Rat s = 0;
    for (const auto& p : prior) {
        if (p < 0) throw InputError("negative prior probability");
        s += p;
    }
    if (s != 1) throw InputError("prior must sum to exactly 1");
    auto check_cube = [&](const std::vector<std::vector<std::vector<Rat>>>& c,
                          const char* what) {
        if (int(c.size()) != N) throw InputError(std::string(what) + " size mismatch");
        for (const auto& row : c) {
            if (int(row.size()) != N) throw InputError(std::string(what) + " size mismatch");
            for (const auto& cell : row)
                if (int(cell.size()) != W)
                    throw InputError(std::string(what) + " size mismatch");
        }
    };
    check_cube(val_a, "values(a)");
    check_cube(val_b, "values(b)");
    check_cube(util, "utilities");
}

Rat value_under_posterior(const Instance& inst, Side side, int x, int y,
                          const Posterior& p) {
    if (int(p.size()) != inst.num_worlds()) throw InputError("posterior size mismatch");
    Rat v = 0;
    for (int w = 0; w < inst.num_worlds(); ++w)
        if (p[size_t(w)] != 0) v += p[size_t(w)] * inst.value(side, x, y, w);
    return v;
}

Rat value_under_posterior(const Instance& inst, const std::string& x,
                          const std::string& y, const Posterior& p) {
    // x may be on either side; y must be opposite
    for (size_t i = 0; i < inst.side_a.size(); ++i)
        if (inst.side_a[i] == x)
            return value_under_posterior(inst, Side::A, int(i),
                                         inst.agent_index(Side::B, y), p);
    return value_under_posterior(inst, Side::B, inst.agent_index(Side::B, x),
                                 inst.agent_index(Side::A, y), p);
}

Rat matching_utility(const Instance& inst, const Matching& m, int w) {
    Rat u = 0;
    for (int i = 0; i < inst.n(); ++i)
        u += inst.util[size_t(i)][size_t(m.a_to_b[size_t(i)])][size_t(w)];
    return u;
}

Rat signal_marginal(const Instance& inst, const std::vector<Rat>& kernel_row) {
    Rat s = 0;
    for (int w = 0; w < inst.num_worlds(); ++w)
        s += inst.prior[size_t(w)] * kernel_row[size_t(w)];
    return s;
}

Posterior posterior_of_metasignal(const Instance& inst, const PublicPolicy& pol,
                                  int sig_index) {
    const auto& row = pol.kernel.at(size_t(sig_index));
    Rat marg = signal_marginal(inst, row);
    if (marg == 0) throw InputError("unreachable meta-signal has no posterior");
    Posterior p(size_t(inst.num_worlds()));
    for (int w = 0; w < inst.num_worlds(); ++w)
        p[size_t(w)] = inst.prior[size_t(w)] * row[size_t(w)] / marg;
    return p;
}

Posterior private_posterior(const Instance& inst, const PrivatePolicy& pol,
                            Side side, int x, const AgentOrder& component,
                            const Matching& m) {
    std::vector<Rat> q(size_t(inst.num_worlds()), Rat(0));
    Rat marg = 0;
    for (size_t s = 0; s < pol.signals.size(); ++s) {
        const auto& sig = pol.signals[s];
        if (sig.matching != m) continue;
        const auto& comp = side == Side::A ? sig.comp_a[size_t(x)] : sig.comp_b[size_t(x)];
        if (!(comp == component)) continue;
        for (int w = 0; w < inst.num_worlds(); ++w) {
            Rat c = inst.prior[size_t(w)] * pol.kernel[s][size_t(w)];
            q[size_t(w)] += c;
            marg += c;
        }
    }
    if (marg == 0) throw InputError("unreachable private observation has no posterior");
    for (auto& v : q) v /= marg;
    return q;
}

StabilityReport is_stable_matching(const Instance& inst, const Matching& m,
                                   const Posterior& p) {
    StabilityReport rep;
    auto inv = m.b_to_a();
    for (int i = 0; i < inst.n(); ++i) {
        Rat va_own = value_under_posterior(inst, Side::A, i, m.a_to_b[size_t(i)], p);
        for (int j = 0; j < inst.n(); ++j) {
            if (m.a_to_b[size_t(i)] == j) continue;
            if (value_under_posterior(inst, Side::A, i, j, p) <= va_own) continue;
            Rat vb_own = value_under_posterior(inst, Side::B, j, inv[size_t(j)], p);
            if (value_under_posterior(inst, Side::B, j, i, p) <= vb_own) continue;
            rep.blocking.push_back({i, j});
        }
    }
    rep.stable = rep.blocking.empty();
    return rep;
}

bool order_stable(const PreferenceProfile& prof, const Matching& m) {
    int n = int(m.a_to_b.size());
    auto inv = m.b_to_a();
    std::vector<std::vector<int>> ra(size_t(n), std::vector<int>{}), rb(size_t(n), std::vector<int>{});
    for (int i = 0; i < n; ++i) {
        ra[size_t(i)] = prof.of_a[size_t(i)].rank_of(n);
        rb[size_t(i)] = prof.of_b[size_t(i)].rank_of(n);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (m.a_to_b[size_t(i)] == j) continue;
            if (ra[size_t(i)][size_t(j)] < ra[size_t(i)][size_t(m.a_to_b[size_t(i)])] &&
                rb[size_t(j)][size_t(i)] < rb[size_t(j)][size_t(inv[size_t(j)])])
                return false;
        }
    return true;
}

namespace {

AgentOrder induced_order(const Instance& inst, Side side, int x, const Posterior& p) {
    int n = inst.n();
    std::vector<std::pair<Rat, int>> vals;
    for (int y = 0; y < n; ++y)
        vals.push_back({value_under_posterior(inst, side, x, y, p), y});
    std::stable_sort(vals.begin(), vals.end(),
                     [](const auto& l, const auto& r) { return l.first > r.first; });
    AgentOrder o;
    for (size_t k = 0; k < vals.size(); ++k) {
        if (k == 0 || vals[k].first != vals[k - 1].first) o.tiers.push_back({});
        o.tiers.back().push_back(vals[k].second);
    }
    return o;
}

}  // namespace

PreferenceProfile induced_profile(const Instance& inst, const Posterior& p,
                                  const PreferenceProfile* tie_break) {
    PreferenceProfile prof;
    prof.strict = true;
    for (int i = 0; i < inst.n(); ++i) {
        prof.of_a.push_back(induced_order(inst, Side::A, i, p));
        prof.strict = prof.strict && prof.of_a.back().strict();
    }
    for (int j = 0; j < inst.n(); ++j) {
        prof.of_b.push_back(induced_order(inst, Side::B, j, p));
        prof.strict = prof.strict && prof.of_b.back().strict();
    }
    if (!tie_break) return prof;

    // The template must be strict and must respect every strict comparison of
    // the induced weak order; it then is the refinement.
    auto refine = [&](Side side, int x, const AgentOrder& weak,
                      const AgentOrder& tmpl) {
        if (!tmpl.strict()) throw InputError("tie-break template must be strict");
        auto wr = weak.rank_of(inst.n());
        auto tr = tmpl.rank_of(inst.n());
        for (int y = 0; y < inst.n(); ++y)
            for (int z = 0; z < inst.n(); ++z)
                if (wr[size_t(y)] < wr[size_t(z)] && tr[size_t(y)] > tr[size_t(z)])
                    throw InputError("tie-break template contradicts induced order");
        (void)side;
        (void)x;
        return tmpl;
    };
    PreferenceProfile out;
    out.strict = true;
    for (int i = 0; i < inst.n(); ++i)
        out.of_a.push_back(refine(Side::A, i, prof.of_a[size_t(i)], tie_break->of_a[size_t(i)]));
    for (int j = 0; j < inst.n(); ++j)
        out.of_b.push_back(refine(Side::B, j, prof.of_b[size_t(j)], tie_break->of_b[size_t(j)]));
    return out;
}

PolicyCheck is_stable_policy(const Instance& inst, const PublicPolicy& pol) {
    for (size_t s = 0; s < pol.signals.size(); ++s) {
        if (signal_marginal(inst, pol.kernel[s]) == 0) continue;  // off-support
        Posterior p = posterior_of_metasignal(inst, pol, int(s));
        auto rep = is_stable_matching(inst, pol.signals[s].matching, p);
        if (!rep.stable) {
            return {false, int(s), rep.blocking.front(),
                    "blocking pair at meta-signal " + std::to_string(s)};
        }
    }
    return {};
}

PolicyCheck is_stable_policy(const Instance& inst, const PrivatePolicy& pol) {
    for (size_t s = 0; s < pol.signals.size(); ++s) {
        Rat marg = signal_marginal(inst, pol.kernel[s]);
        if (marg == 0) continue;
        const auto& sig = pol.signals[s];
        auto inv = sig.matching.b_to_a();
        // each agent evaluates with its own aggregated posterior
        std::vector<Posterior> pa(size_t(inst.n())), pb(size_t(inst.n()));
        for (int i = 0; i < inst.n(); ++i)
            pa[size_t(i)] = private_posterior(inst, pol, Side::A, i,
                                              sig.comp_a[size_t(i)], sig.matching);
        for (int j = 0; j < inst.n(); ++j)
            pb[size_t(j)] = private_posterior(inst, pol, Side::B, j,
                                              sig.comp_b[size_t(j)], sig.matching);
        for (int i = 0; i < inst.n(); ++i)
            for (int j = 0; j < inst.n(); ++j) {
                if (sig.matching.a_to_b[size_t(i)] == j) continue;
                Rat va = value_under_posterior(inst, Side::A, i, j, pa[size_t(i)]);
                Rat va_own = value_under_posterior(inst, Side::A, i,
                                                   sig.matching.a_to_b[size_t(i)], pa[size_t(i)]);
                if (va <= va_own) continue;
                Rat vb = value_under_posterior(inst, Side::B, j, i, pb[size_t(j)]);
                Rat vb_own = value_under_posterior(inst, Side::B, j, inv[size_t(j)], pb[size_t(j)]);
                if (vb <= vb_own) continue;
                return {false, int(s), {i, j},
                        "blocking pair under private posteriors at signal " + std::to_string(s)};
            }
    }
    return {};
}

bool posterior_in_cell(const Instance& inst, Side side, int x,
                       const AgentOrder& order, const Posterior& p) {
    std::vector<Rat> vals(size_t(inst.n()));
    for (int y = 0; y < inst.n(); ++y)
        vals[size_t(y)] = value_under_posterior(inst, side, x, y, p);
    for (size_t t = 0; t < order.tiers.size(); ++t) {
        const auto& tier = order.tiers[t];
        for (size_t k = 1; k < tier.size(); ++k)
            if (vals[size_t(tier[k])] != vals[size_t(tier[0])]) return false;
        if (t + 1 < order.tiers.size()) {
            const auto& next = order.tiers[t + 1];
            if (vals[size_t(tier[0])] < vals[size_t(next[0])]) return false;
        }
    }
    return true;
}

bool posterior_in_cell(const Instance& inst, const PreferenceProfile& prof,
                       const Posterior& p) {
    for (int i = 0; i < inst.n(); ++i)
        if (!posterior_in_cell(inst, Side::A, i, prof.of_a[size_t(i)], p)) return false;
    for (int j = 0; j < inst.n(); ++j)
        if (!posterior_in_cell(inst, Side::B, j, prof.of_b[size_t(j)], p)) return false;
    return true;
}

bool is_indicative(const Instance& inst, const PublicPolicy& pol) {
    for (size_t s = 0; s < pol.signals.size(); ++s) {
        const auto& prof = pol.signals[s].profile;
        if (prof.of_a.empty() && prof.of_b.empty())
            throw InputError("meta-signal " + std::to_string(s) + " carries no profile");
        if (signal_marginal(inst, pol.kernel[s]) == 0) continue;
        if (!posterior_in_cell(inst, prof, posterior_of_metasignal(inst, pol, int(s))))
            return false;
    }
    return true;
}

bool is_indicative(const Instance& inst, const PrivatePolicy& pol) {
    for (size_t s = 0; s < pol.signals.size(); ++s) {
        if (signal_marginal(inst, pol.kernel[s]) == 0) continue;
        const auto& sig = pol.signals[s];
        for (int i = 0; i < inst.n(); ++i) {
            Posterior p = private_posterior(inst, pol, Side::A, i,
                                            sig.comp_a[size_t(i)], sig.matching);
            if (!posterior_in_cell(inst, Side::A, i, sig.comp_a[size_t(i)], p))
                return false;
        }
        for (int j = 0; j < inst.n(); ++j) {
            Posterior p = private_posterior(inst, pol, Side::B, j,
                                            sig.comp_b[size_t(j)], sig.matching);
            if (!posterior_in_cell(inst, Side::B, j, sig.comp_b[size_t(j)], p))
                return false;
        }
    }
    return true;
}

namespace {

template <typename Policy>
Rat utility_impl(const Instance& inst, const Policy& pol) {
    Rat u = 0;
    for (size_t s = 0; s < pol.signals.size(); ++s)
        for (int w = 0; w < inst.num_worlds(); ++w) {
            const Rat& k = pol.kernel[s][size_t(w)];
            if (k != 0)
                u += inst.prior[size_t(w)] * k *
                     matching_utility(inst, pol.signals[s].matching, w);
        }
    return u;
}

}  // namespace

Rat policy_utility(const Instance& inst, const PublicPolicy& pol) {
    return utility_impl(inst, pol);
}
Rat policy_utility(const Instance& inst, const PrivatePolicy& pol) {
    return utility_impl(inst, pol);
}

bool bayes_plausible(const Instance& inst, const PublicPolicy& pol) {
    int W = inst.num_worlds();
    std::vector<Rat> acc(size_t(W), Rat(0));
    for (size_t s = 0; s < pol.signals.size(); ++s)
        for (int w = 0; w < W; ++w)
            acc[size_t(w)] += inst.prior[size_t(w)] * pol.kernel[s][size_t(w)];
    return acc == inst.prior;
}

PublicPolicy reduce_policy_support(const Instance& inst, const PublicPolicy& pol) {
    if (!is_stable_policy(inst, pol).ok || !is_indicative(inst, pol))
        throw InputError("reduce_policy_support needs a stable indicative policy");
    int W = inst.num_worlds();

    // Live signals with their posteriors, weights and per-posterior values.
    std::vector<int> live;
    std::vector<Posterior> post;
    std::vector<Rat> weight, val;
    for (size_t s = 0; s < pol.signals.size(); ++s) {
        Rat marg = signal_marginal(inst, pol.kernel[s]);
        if (marg == 0) continue;
        live.push_back(int(s));
        post.push_back(posterior_of_metasignal(inst, pol, int(s)));
        weight.push_back(marg);
        Rat v = 0;
        for (int w = 0; w < W; ++w)
            v += post.back()[size_t(w)] * matching_utility(inst, pol.signals[s].matching, w);
        val.push_back(v);
    }
    int k = int(live.size());

    // Decomposition LP: reweight the existing posteriors to average back to
    // the prior, maximizing expected utility. The input weights are feasible,
    // so the optimum never loses utility.
    LinearProgram lp;
    for (int i = 0; i < k; ++i) lp.add_var("phi" + std::to_string(i));
    lp.objective = val;
    for (int w = 0; w < W; ++w) {
        std::vector<Rat> a(size_t(k), Rat(0));
        for (int i = 0; i < k; ++i) a[size_t(i)] = post[size_t(i)][size_t(w)];
        lp.add_con(a, Rel::Eq, inst.prior[size_t(w)]);
    }
    auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal)
        throw InternalError("posterior decomposition LP infeasible");
    std::vector<Rat> phi = res.x;

    auto support_size = [&] {
        int c = 0;
        for (const auto& f : phi)
            if (f != 0) ++c;
        return c;
    };
    // Shift along a vanishing combination of (posterior, 1, value) rows until
    // the support fits. A basic LP optimum already fits; this loop guards the
    // degenerate leftovers.
    while (support_size() > W) {
        std::vector<int> sup;
        for (int i = 0; i < k; ++i)
            if (phi[size_t(i)] != 0) sup.push_back(i);
        std::vector<std::vector<Rat>> rows;
        for (int i : sup) {
            std::vector<Rat> r = post[size_t(i)];
            r.push_back(1);
            r.push_back(val[size_t(i)]);
            rows.push_back(std::move(r));
        }
        auto c = kernel_vector(rows);
        if (!c) throw InternalError("support reduction found no vanishing combination");
        bool has_pos = false;
        for (const auto& v : *c) has_pos = has_pos || v > 0;
        if (!has_pos)
            for (auto& v : *c) v = -v;
        Rat lam;
        bool first = true;
        for (size_t i = 0; i < sup.size(); ++i) {
            if ((*c)[i] <= 0) continue;
            Rat cand = phi[size_t(sup[i])] / (*c)[i];
            if (first || cand < lam) lam = cand;
            first = false;
        }
        for (size_t i = 0; i < sup.size(); ++i)
            phi[size_t(sup[i])] -= lam * (*c)[i];
    }

    PublicPolicy out;
    for (int i = 0; i < k; ++i) {
        if (phi[size_t(i)] == 0) continue;
        out.signals.push_back(pol.signals[size_t(live[size_t(i)])]);
        std::vector<Rat> row(size_t(W), Rat(0));
        for (int w = 0; w < W; ++w)
            if (inst.prior[size_t(w)] != 0)
                row[size_t(w)] = phi[size_t(i)] * post[size_t(i)][size_t(w)] /
                                 inst.prior[size_t(w)];
        out.kernel.push_back(std::move(row));
    }
    if (out.signals.empty()) {  // zero-utility corner: keep one signal fully
        out.signals.push_back(pol.signals.at(0));
        out.kernel.push_back(std::vector<Rat>(size_t(W), Rat(1)));
    }
    // Worlds outside every kept posterior's support still need kernel mass.
    for (int w = 0; w < W; ++w) {
        Rat s = 0;
        for (const auto& row : out.kernel) s += row[size_t(w)];
        if (s != 1) {
            if (inst.prior[size_t(w)] != 0)
                throw InternalError("kernel column does not sum to 1 on a live world");
            out.kernel[0][size_t(w)] += Rat(1) - s;
        }
    }
    return out;
}

}  // namespace psm
