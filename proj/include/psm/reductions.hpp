#pragma once

#include <string>
#include <vector>

#include "psm/matching.hpp"
#include "psm/model.hpp"

namespace psm {

// Stable marriage with ties and incomplete lists, ties only on the A side and
// of length exactly two. A tie {b, b'} sits tied at the end of a's list,
// below every ranked entry and disjoint from them.
struct SmtiInstance {
    std::vector<std::string> side_a, side_b;
    std::vector<std::vector<int>> prefs_a;  // ranked acceptable partners, best first
    std::vector<std::vector<int>> prefs_b;
    std::vector<std::vector<int>> ties_a;   // per A-agent: empty or {b, b'}

    int na() const { return int(side_a.size()); }
    int nb() const { return int(side_b.size()); }
    void validate() const;  // InputError naming the offending agent
};

// Partial matching for SMTI search: -1 means unmatched.
struct SmtiMatching {
    std::vector<int> a_to_b;
};

bool smti_weakly_stable(const SmtiInstance& m, const SmtiMatching& mm);

// Exhaustive maximum weakly stable matching size; testing oracle.
int smti_max_stable_size(const SmtiInstance& m, int cap = 6);

struct SmtiRestrictResult {
    SmtiInstance out;
    int a2 = 0;  // |A''|: one per B-agent appearing in exactly one tie
    int a3 = 0;  // |A'''|: one per B-agent appearing in two or more ties
};

// Eliminates tie sharing: duplicates multiply-tied B-agents and pads with
// dummy agents so each B-agent sits in at most one tie, preserving the
// maximum stable matching size up to the added dummies.
SmtiRestrictResult smti_restrict(const SmtiInstance& m);

// Keeps mutually acceptable entries in list order, drops one-sided entries
// into the appended tail, and puts weight 1 exactly on mutually acceptable
// original pairs. Optimal WSM value = max stable matching size.
WsmProblem smti_to_wsm(const SmtiInstance& m);

// Two-world persuasion gadget: ties become world-dependent value crossings,
// an extra dummy pair (a', b') anchors the signal, and every stable private
// policy's utility matches a weighted stable matching of the input.
// Weak profile: at most one two-cycle tie per A-agent, B side strict,
// weights within [0, 1].
Instance wsm_to_private_persuasion(const WsmProblem& w);

// The constructive optimal policy for the gadget: reveal the world to agents
// whose target order disagrees with the prior order, babble to the rest, and
// always play m_star extended by (a', b').
PrivatePolicy build_proof_policy(const Instance& reduced, const Matching& m_star,
                                 const PreferenceProfile& target);

// Multi-receiver public persuasion with two actions.
struct PersuasionInstance {
    std::vector<std::string> worlds;
    std::vector<Rat> prior;
    std::vector<std::string> receivers;
    // payoff[i][j][w]: receiver i's payoff from action j; sender[i][j][w]:
    // the principal's gain when receiver i plays action j.
    std::vector<std::vector<std::vector<Rat>>> payoff, sender;

    void validate() const;
};

// Embeds the persuasion instance into a matching instance whose stable
// matchings pair each receiver with its posterior-optimal action copy.
Instance persuasion_to_matching(const PersuasionInstance& pp);

}  // namespace psm
