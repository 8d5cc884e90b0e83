#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psm/rational.hpp"

namespace psm {

enum class Side { A, B };

// One agent's ranking of the opposite side as tiers, best tier first.
// Agents inside a tier are tied. A strict order has singleton tiers.
struct AgentOrder {
    std::vector<std::vector<int>> tiers;

    bool strict() const;
    // rank_of[y] = tier index of opposite-side agent y (0 = best)
    std::vector<int> rank_of(int n) const;
    bool operator==(const AgentOrder&) const = default;
};

AgentOrder strict_order_from_ranking(const std::vector<int>& best_first);

struct PreferenceProfile {
    bool strict = false;
    std::vector<AgentOrder> of_a, of_b;  // indexed by agent position

    const AgentOrder& of(Side s, int i) const {
        return s == Side::A ? of_a[size_t(i)] : of_b[size_t(i)];
    }
    bool operator==(const PreferenceProfile&) const = default;
};

struct Matching {
    std::vector<int> a_to_b;  // a_to_b[i] = index into side_b

    std::vector<int> b_to_a() const;
    int partner(Side s, int i) const;
    auto operator<=>(const Matching&) const = default;
};

using Posterior = std::vector<Rat>;

struct Instance {
    std::vector<std::string> worlds;
    std::vector<Rat> prior;
    std::vector<std::string> side_a, side_b;
    // val_a[i][j][w]: a_i's value for b_j in world w; val_b[j][i][w] mirrors.
    std::vector<std::vector<std::vector<Rat>>> val_a, val_b;
    // util[i][j][w]: principal's utility when (a_i, b_j) are matched in w.
    std::vector<std::vector<std::vector<Rat>>> util;

    int n() const { return int(side_a.size()); }
    int num_worlds() const { return int(worlds.size()); }
    const Rat& value(Side s, int x, int y, int w) const {
        return s == Side::A ? val_a[size_t(x)][size_t(y)][size_t(w)]
                            : val_b[size_t(x)][size_t(y)][size_t(w)];
    }
    int agent_index(Side s, const std::string& id) const;  // InputError if unknown
    int world_index(const std::string& id) const;
    void validate() const;  // InputError on violated invariants
};

struct MetaSignal {
    PreferenceProfile profile;
    Matching matching;
    std::string tag;  // disambiguates merged signals; not observed by agents
};

struct PublicPolicy {
    std::vector<MetaSignal> signals;
    std::vector<std::vector<Rat>> kernel;  // kernel[sig][world]
};

// Per-agent signal components; agent x observes (component_x, matching).
struct JointSignal {
    std::vector<AgentOrder> comp_a, comp_b;
    Matching matching;
    std::string tag;
};

struct PrivatePolicy {
    std::vector<JointSignal> signals;
    std::vector<std::vector<Rat>> kernel;
};

// --- basic evaluations -------------------------------------------------

Rat value_under_posterior(const Instance& inst, Side side, int x, int y,
                          const Posterior& p);
// id-based convenience wrapper; throws InputError on unknown identifiers
Rat value_under_posterior(const Instance& inst, const std::string& x,
                          const std::string& y, const Posterior& p);

Rat matching_utility(const Instance& inst, const Matching& m, int w);

// marginal probability of a meta-signal: sum_w mu(w) * kernel[sig][w]
Rat signal_marginal(const Instance& inst, const std::vector<Rat>& kernel_row);

// Bayes posterior of a public meta-signal; InputError on zero marginal.
Posterior posterior_of_metasignal(const Instance& inst, const PublicPolicy& pol,
                                  int sig_index);

// Posterior of agent x after observing its own component and the matching,
// marginalized over joint signals sharing that observation.
Posterior private_posterior(const Instance& inst, const PrivatePolicy& pol,
                            Side side, int x, const AgentOrder& component,
                            const Matching& m);

// --- stability / indicativeness ----------------------------------------

struct StabilityReport {
    bool stable = true;
    // pairs (i, j) where a_i and b_j both strictly prefer each other
    std::vector<std::pair<int, int>> blocking;
};

StabilityReport is_stable_matching(const Instance& inst, const Matching& m,
                                   const Posterior& p);

// Order-based stability: blocking needs strict preference in the declared
// orders on both sides. Used by the LP column filters.
bool order_stable(const PreferenceProfile& prof, const Matching& m);

PreferenceProfile induced_profile(const Instance& inst, const Posterior& p,
                                  const PreferenceProfile* tie_break = nullptr);

struct PolicyCheck {
    bool ok = true;
    int signal = -1;
    std::pair<int, int> pair{-1, -1};
    std::string note;
};

PolicyCheck is_stable_policy(const Instance& inst, const PublicPolicy& pol);
PolicyCheck is_stable_policy(const Instance& inst, const PrivatePolicy& pol);

// true iff p satisfies every relation the order declares, ties as equalities
bool posterior_in_cell(const Instance& inst, Side side, int x,
                       const AgentOrder& order, const Posterior& p);
bool posterior_in_cell(const Instance& inst, const PreferenceProfile& prof,
                       const Posterior& p);

bool is_indicative(const Instance& inst, const PublicPolicy& pol);
// private analogue: each agent's aggregated posterior lies in the cell of
// its declared component
bool is_indicative(const Instance& inst, const PrivatePolicy& pol);

Rat policy_utility(const Instance& inst, const PublicPolicy& pol);
Rat policy_utility(const Instance& inst, const PrivatePolicy& pol);

// sum over signals of P(sig) * posterior(sig) == prior, exactly
bool bayes_plausible(const Instance& inst, const PublicPolicy& pol);

// Shrinks a stable indicative policy to at most |worlds| meta-signals with
// no utility loss: posterior-decomposition LP, then combination shifts while
// the support is still too large.
PublicPolicy reduce_policy_support(const Instance& inst, const PublicPolicy& pol);

}  // namespace psm
