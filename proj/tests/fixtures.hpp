#pragma once

// Shared instance builders for the test suite.

#include <string>
#include <vector>

#include "psm/model.hpp"
#include "psm/typed.hpp"

namespace fx {

using psm::Instance;
using psm::Rat;

inline std::vector<std::vector<std::vector<Rat>>> cube(
    std::vector<std::vector<std::vector<int>>> v) {
    std::vector<std::vector<std::vector<Rat>>> c;
    for (auto& row : v) {
        c.push_back({});
        for (auto& cell : row) {
            c.back().push_back({});
            for (int x : cell) c.back().back().push_back(Rat(x));
        }
    }
    return c;
}

// Two-sided 2x2 instance over two worlds: a1 is torn about b2, b2 is torn
// about a2, and the principal only values the pair (a1, b1). The identity
// matching is stable in each pure world but not under the mixed prior.
inline Instance example1() {
    Instance in;
    in.worlds = {"w1", "w2"};
    in.prior = {Rat(1, 2), Rat(1, 2)};
    in.side_a = {"a1", "a2"};
    in.side_b = {"b1", "b2"};
    in.val_a = cube({{{0, 0}, {-1, 2}}, {{0, 0}, {1, 1}}});
    in.val_b = cube({{{1, 1}, {0, 0}}, {{0, 0}, {-2, 1}}});
    in.util = cube({{{1, 1}, {0, 0}}, {{0, 0}, {0, 0}}});
    in.validate();
    return in;
}

// Typed instance where the best matching needs different signals for agents
// of the same type: the four A1 agents split between B1 (kept in the dark)
// and B2 (told the world), and B3 must always learn the world.
inline psm::TypedInstance example2() {
    psm::TypedInstance ti;
    ti.worlds = {"w1", "w2"};
    ti.prior = {Rat(1, 2), Rat(1, 2)};
    ti.a_types = {"A1", "A2"};
    ti.b_types = {"B1", "B2", "B3", "B4"};
    ti.a_sizes = {psm::Int(4), psm::Int(2)};
    ti.b_sizes = {psm::Int(2), psm::Int(2), psm::Int(1), psm::Int(1)};
    ti.val_a = cube({{{-1, 3}, {0, 0}, {2, -1}, {0, 0}},
                     {{0, 0}, {0, 0}, {0, 0}, {0, 0}}});
    ti.val_b = cube({{{1, 1}, {0, 0}},
                     {{1, 1}, {0, 0}},
                     {{-1, 2}, {0, 0}},
                     {{1, 1}, {0, 0}}});
    ti.util = cube({{{1, 1}, {1, 1}, {0, 0}, {0, 0}},
                    {{0, 0}, {0, 0}, {0, 0}, {0, 0}}});
    ti.validate();
    return ti;
}

inline psm::Matching m_identity(int n) {
    psm::Matching m;
    for (int i = 0; i < n; ++i) m.a_to_b.push_back(i);
    return m;
}

inline psm::Matching m_swap2() { return psm::Matching{{1, 0}}; }

}  // namespace fx
