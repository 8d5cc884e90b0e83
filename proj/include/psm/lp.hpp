#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psm/rational.hpp"

namespace psm {

enum class Rel { Le, Eq, Ge };

struct LinCon {
    std::vector<Rat> a;  // one coefficient per variable
    Rel rel = Rel::Le;
    Rat rhs = 0;
};

// Maximization LP over exact rationals. A variable's bound is either a
// rational lower bound or absent (free); there are no upper bounds.
struct LinearProgram {
    int num_vars = 0;
    std::vector<std::string> var_names;        // optional, for dumps
    std::vector<Rat> objective;                // maximize c.x
    std::vector<LinCon> cons;
    std::vector<std::optional<Rat>> lower;     // empty => all zeros

    int add_var(const std::string& name = "", std::optional<Rat> lo = Rat(0));
    void add_con(std::vector<Rat> a, Rel rel, Rat rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rat value = 0;
    std::vector<Rat> x;
};

// Two-phase simplex with Bland's rule. Deterministic: identical input gives
// identical output, including the chosen optimal basic solution.
LpResult lp_solve(const LinearProgram& lp);

struct Polytope {
    int num_vars = 0;
    std::vector<LinCon> cons;
    std::vector<std::optional<Rat>> lower;     // empty => all zeros

    static Polytope of(const LinearProgram& lp);
};

// All vertices, deduplicated, sorted lexicographically. Throws CapacityError
// when num_vars exceeds the cap and InputError when the polytope is
// unbounded. Method: enumerate tight constraint subsets (equalities always
// included), solve each square system, keep feasible unique solutions.
std::vector<std::vector<Rat>> enumerate_vertices(const Polytope& poly, int dim_cap = 16);

// Feasibility shortcut: true iff some point satisfies every constraint.
bool polytope_feasible(const Polytope& poly);

// Plain-text dump, one constraint per line; used by tests and debug reports.
std::string dump_lp(const LinearProgram& lp);

// Exact Gaussian elimination utilities (shared by the solvers).
int matrix_rank(std::vector<std::vector<Rat>> m);
// Unique solution of A.x = b, or nullopt when singular/inconsistent.
std::optional<std::vector<Rat>> solve_unique(std::vector<std::vector<Rat>> a,
                                             std::vector<Rat> b);
// A nontrivial kernel vector of the row system, or nullopt if full rank.
std::optional<std::vector<Rat>> kernel_vector(const std::vector<std::vector<Rat>>& rows);

}  // namespace psm
