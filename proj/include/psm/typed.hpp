#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "psm/model.hpp"

namespace psm {

// Type-level instance: agents are interchangeable within a type, so matchings
// collapse to count matrices and policies can be solved at type granularity.
struct TypedInstance {
    std::vector<std::string> worlds;
    std::vector<Rat> prior;
    std::vector<std::string> a_types, b_types;
    std::vector<Int> a_sizes, b_sizes;
    // val_a[s][t][w]: an A-agent of type s values a B-agent of type t;
    // val_b[t][s][w] mirrors. util[s][t][w] is the principal's per-pair gain.
    std::vector<std::vector<std::vector<Rat>>> val_a, val_b, util;

    int ta() const { return int(a_types.size()); }
    int tb() const { return int(b_types.size()); }
    int num_worlds() const { return int(worlds.size()); }
    Int n() const;
    void validate() const;
    int a_type_index(const std::string& id) const;
    int b_type_index(const std::string& id) const;
    int world_index(const std::string& id) const;
};

// set of type pairs a matching may use
using Prototype = std::vector<std::pair<int, int>>;

struct PrototypeMatching {
    // counts[s][t]: how many (type s, type t) pairs the matching contains
    std::vector<std::vector<Int>> counts;

    auto operator<=>(const PrototypeMatching&) const = default;
};

Prototype prototype_of(const PrototypeMatching& m);

// One type-level meta-signal. Public signals rank at type granularity;
// private signals rank per subtype (own type, matched partner type).
struct TypedMetaSignal {
    // public mode: order_a[s] ranks B-types, order_b[t] ranks A-types
    std::vector<AgentOrder> order_a, order_b;
    // private mode: component per subtype, keyed by (own type, partner type)
    std::map<std::pair<int, int>, AgentOrder> comp_a, comp_b;
    PrototypeMatching matching;
    std::string tag;
};

struct TypedPolicy {
    bool is_private = false;
    std::vector<TypedMetaSignal> signals;
    std::vector<std::vector<Rat>> kernel;  // kernel[sig][world]
    Rat value;                             // principal's expected utility
};

// All vertices of the transportation polytope restricted to the prototype's
// support. Every vertex is integral; a violation is an internal error.
std::vector<PrototypeMatching> vertex_set(const TypedInstance& ti, const Prototype& p,
                                          int type_cap = 5);

// Union of vertex sets over all prototypes, deduplicated.
std::vector<PrototypeMatching> vertex_union(const TypedInstance& ti, int type_cap = 5);

// Best replacement matching for signal mass q(w): maximize sum_w q(w) u(M'|w)
// over the prototype's polytope. InputError with the failing marginal when
// the prototype cannot carry the sizes.
std::pair<PrototypeMatching, Rat> best_prototype_substitute(
    const TypedInstance& ti, const Prototype& p, const std::vector<Rat>& q);

TypedPolicy solve_public_typed(const TypedInstance& ti, int type_cap = 5);
TypedPolicy solve_private_typed(const TypedInstance& ti, int type_cap = 5);

// Materialize a typed policy over concrete agents in canonical index order.
struct ExpandedPolicy {
    Instance instance;
    bool is_private = false;
    PublicPolicy pub;
    PrivatePolicy priv;
};

Instance expand_typed_instance(const TypedInstance& ti, Int agent_cap = Int(10000));
ExpandedPolicy expand_typed_policy(const TypedInstance& ti, const TypedPolicy& tp,
                                   Int agent_cap = Int(10000));

}  // namespace psm
