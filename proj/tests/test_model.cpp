#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "psm/errors.hpp"
#include "psm/model.hpp"
#include "psm/region.hpp"

using namespace psm;

namespace {

Posterior point_mass(int W, int w) {
    Posterior p(size_t(W), Rat(0));
    p[size_t(w)] = 1;
    return p;
}

// full-revelation policy: one meta-signal per world, profile induced there
PublicPolicy reveal_policy(const Instance& inst, const Matching& per_world_m,
                           bool swap_in_last = false) {
    PublicPolicy pol;
    for (int w = 0; w < inst.num_worlds(); ++w) {
        Posterior p = point_mass(inst.num_worlds(), w);
        Matching m = per_world_m;
        if (swap_in_last && w == inst.num_worlds() - 1) m = fx::m_swap2();
        pol.signals.push_back({induced_profile(inst, p), m, "w" + std::to_string(w)});
        std::vector<Rat> row(size_t(inst.num_worlds()), Rat(0));
        row[size_t(w)] = 1;
        pol.kernel.push_back(row);
    }
    return pol;
}

}  // namespace

TEST_CASE("expected values under posteriors") {
    Instance in = fx::example1();
    Posterior prior = {Rat(1, 2), Rat(1, 2)};
    // a1's view of b2 crosses zero: -1 in w1, 2 in w2
    CHECK(value_under_posterior(in, Side::A, 0, 1, prior) == Rat(1, 2));
    CHECK(value_under_posterior(in, Side::A, 0, 1, point_mass(2, 0)) == Rat(-1));
    CHECK(value_under_posterior(in, Side::A, 0, 1, point_mass(2, 1)) == Rat(2));
    // b2's view of a2: -2 in w1, 1 in w2
    CHECK(value_under_posterior(in, Side::B, 1, 1, prior) == Rat(-1, 2));
    CHECK(value_under_posterior(in, "b2", "a2", prior) == Rat(-1, 2));
    CHECK(value_under_posterior(in, "a2", "b2", prior) == Rat(1));
    CHECK_THROWS_AS(value_under_posterior(in, "a9", "b1", prior), InputError);
}

TEST_CASE("posterior of a meta-signal follows Bayes") {
    Instance in = fx::example1();
    PublicPolicy pol;
    PreferenceProfile prof = induced_profile(in, {Rat(1, 2), Rat(1, 2)});
    pol.signals = {{prof, fx::m_identity(2), "s0"}, {prof, fx::m_swap2(), "s1"}};
    pol.kernel = {{Rat(1), Rat(1, 2)}, {Rat(0), Rat(1, 2)}};
    CHECK(signal_marginal(in, pol.kernel[0]) == Rat(3, 4));
    Posterior p0 = posterior_of_metasignal(in, pol, 0);
    CHECK(p0 == Posterior{Rat(2, 3), Rat(1, 3)});
    Posterior p1 = posterior_of_metasignal(in, pol, 1);
    CHECK(p1 == Posterior{Rat(0), Rat(1)});

    pol.kernel = {{Rat(1), Rat(1)}, {Rat(0), Rat(0)}};
    CHECK_THROWS_AS(posterior_of_metasignal(in, pol, 1), InputError);
}

TEST_CASE("identity matching: stable in pure worlds, blocked at the prior") {
    Instance in = fx::example1();
    Matching m1 = fx::m_identity(2);
    CHECK(is_stable_matching(in, m1, point_mass(2, 0)).stable);
    CHECK(is_stable_matching(in, m1, point_mass(2, 1)).stable);
    // at t = P(w2) strictly between 1/3 and 2/3, a1 and b2 block
    auto rep = is_stable_matching(in, m1, {Rat(1, 2), Rat(1, 2)});
    CHECK_FALSE(rep.stable);
    REQUIRE(rep.blocking.size() == 1);
    CHECK(rep.blocking[0] == std::pair<int, int>{0, 1});
    // exactly at the thresholds the preference is weak, so no block
    CHECK(is_stable_matching(in, m1, {Rat(2, 3), Rat(1, 3)}).stable);
    CHECK(is_stable_matching(in, m1, {Rat(1, 3), Rat(2, 3)}).stable);
    // the swap matching is blocked by (a1, b1) in w1 but stable in w2
    auto swp = is_stable_matching(in, fx::m_swap2(), point_mass(2, 0));
    CHECK_FALSE(swp.stable);
    REQUIRE(swp.blocking.size() == 1);
    CHECK(swp.blocking[0] == std::pair<int, int>{0, 0});
    // ... and by (a2, b2) in w2; it needs a mixed belief to hold up
    auto swp2 = is_stable_matching(in, fx::m_swap2(), point_mass(2, 1));
    CHECK_FALSE(swp2.stable);
    CHECK(swp2.blocking[0] == std::pair<int, int>{1, 1});
    CHECK(is_stable_matching(in, fx::m_swap2(), {Rat(1, 2), Rat(1, 2)}).stable);
}

TEST_CASE("induced profiles and order stability") {
    Instance in = fx::example1();
    PreferenceProfile prof = induced_profile(in, {Rat(1, 2), Rat(1, 2)});
    CHECK(prof.strict);
    CHECK(prof.of_a[0].tiers == std::vector<std::vector<int>>{{1}, {0}});  // a1: b2 > b1
    CHECK(prof.of_a[1].tiers == std::vector<std::vector<int>>{{1}, {0}});
    CHECK(prof.of_b[0].tiers == std::vector<std::vector<int>>{{0}, {1}});
    CHECK(prof.of_b[1].tiers == std::vector<std::vector<int>>{{0}, {1}});  // b2: a1 > a2
    CHECK_FALSE(order_stable(prof, fx::m_identity(2)));
    CHECK(order_stable(prof, fx::m_swap2()));

    // at t = 1/3 a1 is indifferent: weak order with a tie
    PreferenceProfile weak = induced_profile(in, {Rat(2, 3), Rat(1, 3)});
    CHECK_FALSE(weak.strict);
    CHECK(weak.of_a[0].tiers == std::vector<std::vector<int>>{{0, 1}});
    // ties break only blocking that needs strictness on both sides
    CHECK(order_stable(weak, fx::m_identity(2)));

    // a strict tie-break must refine the induced weak order
    PreferenceProfile tb = induced_profile(in, point_mass(2, 0));
    PreferenceProfile refined = induced_profile(in, {Rat(2, 3), Rat(1, 3)}, &tb);
    CHECK(refined.strict);
    CHECK(refined.of_a[0].tiers == std::vector<std::vector<int>>{{0}, {1}});
    PreferenceProfile bad = induced_profile(in, point_mass(2, 1));
    CHECK_THROWS_AS(induced_profile(in, point_mass(2, 0), &bad), InputError);
}

TEST_CASE("posterior cell membership") {
    Instance in = fx::example1();
    PreferenceProfile prof = induced_profile(in, {Rat(1, 2), Rat(1, 2)});
    CHECK(posterior_in_cell(in, prof, {Rat(1, 2), Rat(1, 2)}));
    // cell of the middle profile is exactly t in [1/3, 2/3]
    CHECK(posterior_in_cell(in, prof, {Rat(2, 3), Rat(1, 3)}));
    CHECK(posterior_in_cell(in, prof, {Rat(1, 3), Rat(2, 3)}));
    CHECK_FALSE(posterior_in_cell(in, prof, {Rat(3, 4), Rat(1, 4)}));
    CHECK_FALSE(posterior_in_cell(in, prof, {Rat(1, 4), Rat(3, 4)}));
    // the tied profile at t = 1/3 requires exact equality
    PreferenceProfile weak = induced_profile(in, {Rat(2, 3), Rat(1, 3)});
    CHECK(posterior_in_cell(in, weak, {Rat(2, 3), Rat(1, 3)}));
    CHECK_FALSE(posterior_in_cell(in, weak, {Rat(1, 2), Rat(1, 2)}));
}

TEST_CASE("full revelation keeps the identity matching stable and earns 1") {
    Instance in = fx::example1();
    PublicPolicy pol = reveal_policy(in, fx::m_identity(2));
    CHECK(is_stable_policy(in, pol).ok);
    CHECK(is_indicative(in, pol));
    CHECK(bayes_plausible(in, pol));
    CHECK(policy_utility(in, pol) == Rat(1));
}

TEST_CASE("uninformative policy on the identity matching is caught") {
    Instance in = fx::example1();
    PublicPolicy pol;
    pol.signals = {{induced_profile(in, {Rat(1, 2), Rat(1, 2)}), fx::m_identity(2), "s"}};
    pol.kernel = {{Rat(1), Rat(1)}};
    auto chk = is_stable_policy(in, pol);
    CHECK_FALSE(chk.ok);
    CHECK(chk.signal == 0);
    CHECK(chk.pair == std::pair<int, int>{0, 1});
    CHECK(is_indicative(in, pol));

    // declaring a profile outside the signal's posterior cell breaks
    // indicativeness even though stability may hold
    pol.signals[0].profile = induced_profile(in, point_mass(2, 1));
    pol.signals[0].matching = fx::m_swap2();
    CHECK_FALSE(is_indicative(in, pol));
}

TEST_CASE("private policies: aggregation across joint signals") {
    Instance in = fx::example1();
    // two joint signals with identical components and matching for everyone:
    // every agent pools them, so each aggregated posterior is the prior
    PreferenceProfile prof = induced_profile(in, {Rat(1, 2), Rat(1, 2)});
    JointSignal s0{prof.of_a, prof.of_b, fx::m_swap2(), "s0"};
    JointSignal s1{prof.of_a, prof.of_b, fx::m_swap2(), "s1"};
    PrivatePolicy pol{{s0, s1}, {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}};
    Posterior agg = private_posterior(in, pol, Side::A, 0, prof.of_a[0], fx::m_swap2());
    CHECK(agg == Posterior{Rat(1, 2), Rat(1, 2)});
    CHECK(is_stable_policy(in, pol).ok);
    CHECK(is_indicative(in, pol));
    CHECK(policy_utility(in, pol) == Rat(0));

    // distinct components are not pooled
    PreferenceProfile prof1 = induced_profile(in, point_mass(2, 1));
    PrivatePolicy split{{JointSignal{prof.of_a, prof.of_b, fx::m_swap2(), "x"},
                         JointSignal{prof1.of_a, prof1.of_b, fx::m_swap2(), "y"}},
                        {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}};
    // a1 ranks b2 first in both signals, so a1 still pools them
    Posterior pooled = private_posterior(in, split, Side::A, 0, prof.of_a[0], fx::m_swap2());
    CHECK(pooled == Posterior{Rat(1, 2), Rat(1, 2)});
    // b2's ranking flips between the signals, so b2 separates them
    Posterior own = private_posterior(in, split, Side::B, 1, prof1.of_b[1], fx::m_swap2());
    CHECK(own == Posterior{Rat(0), Rat(1)});
    Posterior other = private_posterior(in, split, Side::B, 1, prof.of_b[1], fx::m_swap2());
    CHECK(other == Posterior{Rat(1), Rat(0)});
}

TEST_CASE("bayes plausibility holds for any normalized kernel") {
    Instance in = fx::example1();
    std::mt19937_64 rng(7);
    PreferenceProfile prof = induced_profile(in, {Rat(1, 2), Rat(1, 2)});
    for (int trial = 0; trial < 30; ++trial) {
        int k = 1 + int(rng() % 4);
        PublicPolicy pol;
        for (int s = 0; s < k; ++s)
            pol.signals.push_back({prof, fx::m_swap2(), "s" + std::to_string(s)});
        for (int w = 0; w < 2; ++w) {
            std::vector<Rat> col(size_t(k), Rat(0));
            Rat tot = 0;
            for (auto& c : col) {
                c = Rat(int(rng() % 5), 1);
                tot += c;
            }
            if (tot == 0) col[0] = tot = 1;
            for (int s = 0; s < k; ++s) {
                if (w == 0) pol.kernel.push_back({});
                pol.kernel[size_t(s)].push_back(col[size_t(s)] / tot);
            }
        }
        CHECK(bayes_plausible(in, pol));
        Rat mass = 0;
        for (int s = 0; s < k; ++s) mass += signal_marginal(in, pol.kernel[size_t(s)]);
        CHECK(mass == Rat(1));
    }
}

TEST_CASE("support reduction keeps value and shrinks to the world count") {
    Instance in = fx::example1();
    // inflate full revelation into four signals with duplicated posteriors
    PublicPolicy pol;
    PreferenceProfile p0 = induced_profile(in, point_mass(2, 0));
    PreferenceProfile p1 = induced_profile(in, point_mass(2, 1));
    pol.signals = {{p0, fx::m_identity(2), "u"},
                   {p0, fx::m_identity(2), "v"},
                   {p1, fx::m_identity(2), "x"},
                   {p1, fx::m_identity(2), "y"}};
    pol.kernel = {{Rat(1, 3), Rat(0)},
                  {Rat(2, 3), Rat(0)},
                  {Rat(0), Rat(1, 4)},
                  {Rat(0), Rat(3, 4)}};
    REQUIRE(is_stable_policy(in, pol).ok);
    REQUIRE(is_indicative(in, pol));
    Rat before = policy_utility(in, pol);
    PublicPolicy red = reduce_policy_support(in, pol);
    CHECK(int(red.signals.size()) <= in.num_worlds());
    CHECK(policy_utility(in, red) == before);
    CHECK(is_stable_policy(in, red).ok);
    CHECK(is_indicative(in, red));
    CHECK(bayes_plausible(in, red));

    // mixed-posterior inflation: three signals, two distinct posteriors
    PreferenceProfile mid = induced_profile(in, {Rat(1, 2), Rat(1, 2)});
    PublicPolicy pol2;
    pol2.signals = {{mid, fx::m_swap2(), "a"},
                    {mid, fx::m_swap2(), "b"},
                    {p1, fx::m_identity(2), "c"}};
    pol2.kernel = {{Rat(1, 2), Rat(1, 4)},
                   {Rat(1, 2), Rat(1, 4)},
                   {Rat(0), Rat(1, 2)}};
    REQUIRE(is_stable_policy(in, pol2).ok);
    REQUIRE(is_indicative(in, pol2));
    PublicPolicy red2 = reduce_policy_support(in, pol2);
    CHECK(int(red2.signals.size()) <= 2);
    CHECK(policy_utility(in, red2) == policy_utility(in, pol2));
    CHECK(bayes_plausible(in, red2));

    // refusal on a policy that is not stable
    PublicPolicy bad;
    bad.signals = {{mid, fx::m_identity(2), "s"}};
    bad.kernel = {{Rat(1), Rat(1)}};
    CHECK_THROWS_AS(reduce_policy_support(in, bad), InputError);
}

TEST_CASE("instance validation and lookups") {
    Instance in = fx::example1();
    CHECK(in.agent_index(Side::A, "a2") == 1);
    CHECK(in.world_index("w2") == 1);
    CHECK_THROWS_AS(in.agent_index(Side::B, "zz"), InputError);
    CHECK_THROWS_AS(in.world_index("w9"), InputError);
    Instance broken = in;
    broken.prior = {Rat(1, 2), Rat(1, 3)};
    CHECK_THROWS_AS(broken.validate(), InputError);
    broken = in;
    broken.val_a[0][0].pop_back();
    CHECK_THROWS_AS(broken.validate(), InputError);
    broken = in;
    broken.prior = {Rat(3, 2), Rat(-1, 2)};
    CHECK_THROWS_AS(broken.validate(), InputError);
}

TEST_CASE("matching helpers") {
    Matching m = fx::m_swap2();
    CHECK(m.b_to_a() == std::vector<int>{1, 0});
    CHECK(m.partner(Side::A, 0) == 1);
    CHECK(m.partner(Side::B, 0) == 1);
    Matching bad{{0, 0}};
    CHECK_THROWS_AS(bad.b_to_a(), InputError);
}

TEST_CASE("regions carved by one agent's order") {
    Instance in = fx::example1();
    auto va1 = agent_values(in, Side::A, 0);
    // a1 prefers b2 iff P(w2) >= 1/3
    AgentOrder pref_b2 = strict_order_from_ranking({1, 0});
    Region r = order_region(2, va1, pref_b2);
    CHECK(r.contains({Rat(1, 2), Rat(1, 2)}));
    CHECK(r.contains({Rat(2, 3), Rat(1, 3)}));  // boundary, weak
    CHECK_FALSE(r.contains({Rat(3, 4), Rat(1, 4)}));
    CHECK(r.contains_mass({Rat(4), Rat(2)}));  // scale-free
    CHECK(r.nonempty());
    auto pt = r.any_point();
    REQUIRE(pt.has_value());
    CHECK(r.contains(*pt));

    AgentOrder tie{{{0, 1}}};
    Region rt = order_region(2, va1, tie);
    CHECK(rt.contains({Rat(2, 3), Rat(1, 3)}));
    CHECK_FALSE(rt.contains({Rat(1, 2), Rat(1, 2)}));
    CHECK(r.superset_of(rt));
    CHECK_FALSE(rt.superset_of(r));

    Region both = r.intersect(order_region(2, va1, strict_order_from_ranking({0, 1})));
    auto w = both.any_point();
    REQUIRE(w.has_value());
    CHECK(*w == Posterior{Rat(2, 3), Rat(1, 3)});

    // empty region: b2 strictly above b1 and b1 strictly... impossible combo
    Region empty = Region::full(2);
    empty.add_row({Rat(-1), Rat(-1)});
    CHECK_FALSE(empty.nonempty());
    CHECK(r.superset_of(empty));
}

TEST_CASE("above-set regions and realizing orders") {
    Instance in = fx::example1();
    auto va1 = agent_values(in, Side::A, 0);
    // partner b1, above set {b2}: needs v(b2) >= v(b1), i.e. P(w2) >= 1/3
    Region r = above_set_region(2, va1, 0, {false, true});
    CHECK(r.contains({Rat(1, 2), Rat(1, 2)}));
    CHECK_FALSE(r.contains({Rat(3, 4), Rat(1, 4)}));
    AgentOrder o = order_realizing_above_set(2, va1, 0, {false, true},
                                             {Rat(1, 2), Rat(1, 2)});
    CHECK(o.tiers == std::vector<std::vector<int>>{{1}, {0}});
    // on the boundary the tie resolves in favor of the requested set
    AgentOrder ob = order_realizing_above_set(2, va1, 0, {false, true},
                                              {Rat(2, 3), Rat(1, 3)});
    CHECK(ob.tiers == std::vector<std::vector<int>>{{1}, {0}});
    AgentOrder onone = order_realizing_above_set(2, va1, 0, {false, false},
                                                 {Rat(2, 3), Rat(1, 3)});
    CHECK(onone.tiers == std::vector<std::vector<int>>{{0}, {1}});
    CHECK_THROWS_AS(order_realizing_above_set(2, va1, 0, {false, true},
                                              {Rat(1), Rat(0)}),
                    InternalError);
}
