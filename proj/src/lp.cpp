#include "psm/lp.hpp"

#include <algorithm>
#include <sstream>

namespace psm {

int LinearProgram::add_var(const std::string& name, std::optional<Rat> lo) {
    if (lower.empty() && num_vars > 0)
        lower.assign(num_vars, Rat(0));
    ++num_vars;
    var_names.push_back(name.empty() ? "x" + std::to_string(num_vars - 1) : name);
    objective.push_back(0);
    if (!lower.empty() || !lo || *lo != 0) {
        if (lower.empty()) lower.assign(num_vars - 1, Rat(0));
        lower.push_back(lo);
    }
    for (auto& c : cons) c.a.resize(num_vars, Rat(0));
    return num_vars - 1;
}

void LinearProgram::add_con(std::vector<Rat> a, Rel rel, Rat rhs) {
    a.resize(num_vars, Rat(0));
    cons.push_back({std::move(a), rel, std::move(rhs)});
}

Polytope Polytope::of(const LinearProgram& lp) {
    return Polytope{lp.num_vars, lp.cons, lp.lower};
}

namespace {

std::optional<Rat> lower_of(const std::vector<std::optional<Rat>>& lower, int i) {
    if (lower.empty()) return Rat(0);
    return lower[size_t(i)];
}

// Dense rational simplex tableau. Columns 0..ncols-1 are variables, the last
// column is the rhs. basis[r] is the variable occupying row r.
struct Tableau {
    std::vector<std::vector<Rat>> rows;
    std::vector<int> basis;
    int ncols = 0;  // variables only; rhs lives at index ncols

    void pivot(int r, int j) {
        auto& pr = rows[size_t(r)];
        Rat p = pr[size_t(j)];
        for (auto& v : pr) v /= p;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (int(i) == r) continue;
            Rat f = rows[i][size_t(j)];
            if (f == 0) continue;
            for (int c = 0; c <= ncols; ++c) rows[i][size_t(c)] -= f * pr[size_t(c)];
        }
        basis[size_t(r)] = j;
    }
};

// Bland's rule, maximization. cost[j] is the objective coefficient of
// variable j; banned columns never enter. Returns false on unboundedness.
bool run_simplex(Tableau& t, const std::vector<Rat>& cost,
                 const std::vector<bool>& banned) {
    int m = int(t.rows.size());
    // reduced cost row
    std::vector<Rat> red(size_t(t.ncols), Rat(0));
    for (int j = 0; j < t.ncols; ++j) red[size_t(j)] = cost[size_t(j)];
    for (int r = 0; r < m; ++r) {
        Rat cb = cost[size_t(t.basis[size_t(r)])];
        if (cb == 0) continue;
        for (int j = 0; j < t.ncols; ++j) red[size_t(j)] -= cb * t.rows[size_t(r)][size_t(j)];
    }
    for (;;) {
        int enter = -1;
        for (int j = 0; j < t.ncols; ++j) {
            if (banned[size_t(j)]) continue;
            if (red[size_t(j)] > 0) { enter = j; break; }
        }
        if (enter < 0) return true;
        int leave = -1;
        Rat best_ratio = 0;
        for (int r = 0; r < m; ++r) {
            const Rat& arj = t.rows[size_t(r)][size_t(enter)];
            if (arj <= 0) continue;
            Rat ratio = t.rows[size_t(r)].back() / arj;
            if (leave < 0 || ratio < best_ratio ||
                (ratio == best_ratio && t.basis[size_t(r)] < t.basis[size_t(leave)])) {
                leave = r;
                best_ratio = ratio;
            }
        }
        if (leave < 0) return false;
        t.pivot(leave, enter);
        // update reduced costs from the (normalized) pivot row
        Rat f = red[size_t(enter)];
        for (int j = 0; j < t.ncols; ++j) red[size_t(j)] -= f * t.rows[size_t(leave)][size_t(j)];
    }
}

}  // namespace

LpResult lp_solve(const LinearProgram& lp) {
    int n = lp.num_vars;
    // Internal nonnegative variables: bounded x_i = l_i + y_k; free
    // x_i = y_k - y_{k+1}.
    std::vector<Rat> base(size_t(n), Rat(0));
    std::vector<std::pair<int, int>> expand;  // (orig var, sign)
    for (int i = 0; i < n; ++i) {
        auto lo = lower_of(lp.lower, i);
        if (lo) {
            base[size_t(i)] = *lo;
            expand.push_back({i, 1});
        } else {
            expand.push_back({i, 1});
            expand.push_back({i, -1});
        }
    }
    int ny = int(expand.size());
    int m = int(lp.cons.size());

    // Rows in y-space as equalities with slack; rhs made nonnegative.
    struct Row { std::vector<Rat> a; Rat b; bool eq; };
    std::vector<Row> rows;
    rows.reserve(size_t(m));
    for (const auto& c : lp.cons) {
        Row r;
        r.a.assign(size_t(ny), Rat(0));
        for (int k = 0; k < ny; ++k) {
            const Rat& coef = c.a[size_t(expand[size_t(k)].first)];
            if (coef != 0) r.a[size_t(k)] = coef * expand[size_t(k)].second;
        }
        Rat shift = 0;
        for (int i = 0; i < n; ++i)
            if (c.a[size_t(i)] != 0) shift += c.a[size_t(i)] * base[size_t(i)];
        r.b = c.rhs - shift;
        r.eq = (c.rel == Rel::Eq);
        if (c.rel == Rel::Ge) {
            for (auto& v : r.a) v = -v;
            r.b = -r.b;
        }
        rows.push_back(std::move(r));
    }

    // Column layout: y vars, then one slack per inequality row, then
    // artificials as needed.
    int nslack = 0;
    for (const auto& r : rows)
        if (!r.eq) ++nslack;
    int ncols = ny + nslack;
    Tableau t;
    t.ncols = ncols;  // grown below for artificials
    std::vector<int> slack_of(rows.size(), -1);
    {
        int s = 0;
        for (size_t i = 0; i < rows.size(); ++i)
            if (!rows[i].eq) slack_of[i] = ny + s++;
    }
    std::vector<int> art_of(rows.size(), -1);
    std::vector<std::vector<Rat>> mat(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        bool flip = rows[i].b < 0;
        mat[i].assign(size_t(ncols) + 1, Rat(0));
        for (int k = 0; k < ny; ++k)
            mat[i][size_t(k)] = flip ? -rows[i].a[size_t(k)] : rows[i].a[size_t(k)];
        if (slack_of[i] >= 0) mat[i][size_t(slack_of[i])] = flip ? Rat(-1) : Rat(1);
        mat[i].back() = flip ? -rows[i].b : rows[i].b;
        if (slack_of[i] < 0 || flip) art_of[i] = 1;  // placeholder
    }
    int nart = 0;
    for (size_t i = 0; i < rows.size(); ++i)
        if (art_of[i] == 1) art_of[i] = ncols + nart++;
    int total = ncols + nart;
    t.ncols = total;
    t.rows.assign(rows.size(), {});
    t.basis.assign(rows.size(), 0);
    for (size_t i = 0; i < rows.size(); ++i) {
        t.rows[i].assign(size_t(total) + 1, Rat(0));
        for (int c = 0; c < ncols; ++c) t.rows[i][size_t(c)] = mat[i][size_t(c)];
        t.rows[i].back() = mat[i].back();
        if (art_of[i] >= 0) {
            t.rows[i][size_t(art_of[i])] = 1;
            t.basis[i] = art_of[i];
        } else {
            t.basis[i] = slack_of[i];
        }
    }

    std::vector<bool> banned(size_t(total), false);
    if (nart > 0) {
        std::vector<Rat> p1cost(size_t(total), Rat(0));
        for (int j = ncols; j < total; ++j) p1cost[size_t(j)] = -1;
        if (!run_simplex(t, p1cost, banned))
            throw InternalError("phase-1 simplex unbounded");
        Rat p1val = 0;
        for (size_t r = 0; r < t.rows.size(); ++r)
            if (t.basis[r] >= ncols) p1val -= t.rows[r].back();
        if (p1val < 0) return {LpStatus::Infeasible, 0, {}};
        // Drive remaining (value-zero) artificials out of the basis.
        for (size_t r = 0; r < t.rows.size();) {
            if (t.basis[r] < ncols) { ++r; continue; }
            int j = -1;
            for (int c = 0; c < ncols; ++c)
                if (t.rows[r][size_t(c)] != 0) { j = c; break; }
            if (j >= 0) {
                t.pivot(int(r), j);
                ++r;
            } else {
                t.rows.erase(t.rows.begin() + long(r));
                t.basis.erase(t.basis.begin() + long(r));
            }
        }
        for (int j = ncols; j < total; ++j) banned[size_t(j)] = true;
    }

    std::vector<Rat> cost(size_t(total), Rat(0));
    for (int k = 0; k < ny; ++k) {
        const Rat& c = lp.objective.empty() ? Rat(0)
                                            : lp.objective[size_t(expand[size_t(k)].first)];
        if (c != 0) cost[size_t(k)] = c * expand[size_t(k)].second;
    }
    if (!run_simplex(t, cost, banned)) return {LpStatus::Unbounded, 0, {}};

    std::vector<Rat> y(size_t(total), Rat(0));
    for (size_t r = 0; r < t.rows.size(); ++r) y[size_t(t.basis[r])] = t.rows[r].back();
    LpResult res;
    res.status = LpStatus::Optimal;
    res.x.assign(size_t(n), Rat(0));
    for (int i = 0; i < n; ++i) res.x[size_t(i)] = base[size_t(i)];
    for (int k = 0; k < ny; ++k)
        res.x[size_t(expand[size_t(k)].first)] += y[size_t(k)] * expand[size_t(k)].second;
    res.value = 0;
    for (int i = 0; i < n && !lp.objective.empty(); ++i)
        res.value += lp.objective[size_t(i)] * res.x[size_t(i)];
    return res;
}

namespace {

// Echelon accumulator over augmented rows (d coefficients + rhs).
struct Echelon {
    int d;
    std::vector<std::vector<Rat>> rows;  // reduced, each with a pivot column
    std::vector<int> pivots;

    explicit Echelon(int dim) : d(dim) {}

    // 1 = rank grew, 0 = dependent (consistent), -1 = inconsistent.
    int reduce(std::vector<Rat>& row) const {
        for (size_t i = 0; i < rows.size(); ++i) {
            Rat f = row[size_t(pivots[i])];
            if (f == 0) continue;
            for (int c = 0; c <= d; ++c) row[size_t(c)] -= f * rows[i][size_t(c)];
        }
        for (int c = 0; c < d; ++c)
            if (row[size_t(c)] != 0) return 1;
        return row[size_t(d)] == 0 ? 0 : -1;
    }

    void push(std::vector<Rat> row) {
        int p = -1;
        for (int c = 0; c < d; ++c)
            if (row[size_t(c)] != 0) { p = c; break; }
        Rat f = row[size_t(p)];
        for (auto& v : row) v /= f;
        rows.push_back(std::move(row));
        pivots.push_back(p);
    }

    void pop() {
        rows.pop_back();
        pivots.pop_back();
    }

    std::vector<Rat> solve() const {
        // rank == d required; back-substitute into fully reduced form
        std::vector<Rat> x(size_t(d), Rat(0));
        std::vector<std::vector<Rat>> r = rows;
        // Later rows' pivot columns may precede earlier ones, so subtract
        // every non-pivot coefficient; reverse push order makes them known.
        for (size_t i = r.size(); i-- > 0;) {
            int p = pivots[i];
            Rat v = r[i][size_t(d)];
            for (int c = 0; c < d; ++c)
                if (c != p && r[i][size_t(c)] != 0) v -= r[i][size_t(c)] * x[size_t(c)];
            x[size_t(p)] = v;
        }
        return x;
    }
};

}  // namespace

std::vector<std::vector<Rat>> enumerate_vertices(const Polytope& poly, int dim_cap) {
    int d = poly.num_vars;
    if (d > dim_cap)
        throw CapacityError("vertex enumeration dimension " + std::to_string(d) +
                            " exceeds cap " + std::to_string(dim_cap));
    // Normalized inequality list (a.x <= b) and equality list.
    std::vector<std::pair<std::vector<Rat>, Rat>> eqs, ineqs;
    for (const auto& c : poly.cons) {
        if (c.rel == Rel::Eq) {
            eqs.push_back({c.a, c.rhs});
        } else if (c.rel == Rel::Le) {
            ineqs.push_back({c.a, c.rhs});
        } else {
            std::vector<Rat> a = c.a;
            for (auto& v : a) v = -v;
            ineqs.push_back({std::move(a), -c.rhs});
        }
    }
    for (int i = 0; i < d; ++i) {
        auto lo = lower_of(poly.lower, i);
        if (!lo) continue;
        std::vector<Rat> a(size_t(d), Rat(0));
        a[size_t(i)] = -1;
        ineqs.push_back({std::move(a), -*lo});
    }

    // Boundedness / emptiness probes along every coordinate.
    LinearProgram probe;
    probe.num_vars = d;
    probe.cons = poly.cons;
    probe.lower = poly.lower;
    if (probe.lower.empty()) probe.lower.assign(size_t(d), Rat(0));
    probe.objective.assign(size_t(d), Rat(0));
    for (int i = 0; i < d; ++i) {
        for (int s = 0; s < 2; ++s) {
            probe.objective.assign(size_t(d), Rat(0));
            probe.objective[size_t(i)] = s == 0 ? 1 : -1;
            auto r = lp_solve(probe);
            if (r.status == LpStatus::Infeasible) return {};
            if (r.status == LpStatus::Unbounded)
                throw InputError("vertex enumeration on unbounded polytope");
        }
    }

    Echelon ech(d);
    for (const auto& [a, b] : eqs) {
        std::vector<Rat> row = a;
        row.push_back(b);
        int v = ech.reduce(row);
        if (v < 0) return {};
        if (v > 0) ech.push(std::move(row));
    }
    int need = d - int(ech.rows.size());

    std::vector<std::vector<Rat>> out;
    auto feasible = [&](const std::vector<Rat>& x) {
        for (const auto& [a, b] : eqs) {
            Rat s = 0;
            for (int c = 0; c < d; ++c) s += a[size_t(c)] * x[size_t(c)];
            if (s != b) return false;
        }
        for (const auto& [a, b] : ineqs) {
            Rat s = 0;
            for (int c = 0; c < d; ++c) s += a[size_t(c)] * x[size_t(c)];
            if (s > b) return false;
        }
        return true;
    };

    // DFS over independent tight subsets of the inequalities.
    auto rec = [&](auto&& self, int next, int remaining) -> void {
        if (remaining == 0) {
            auto x = ech.solve();
            if (feasible(x)) out.push_back(std::move(x));
            return;
        }
        for (int i = next; i + remaining <= int(ineqs.size()); ++i) {
            std::vector<Rat> row = ineqs[size_t(i)].first;
            row.push_back(ineqs[size_t(i)].second);
            if (ech.reduce(row) != 1) continue;
            ech.push(std::move(row));
            self(self, i + 1, remaining - 1);
            ech.pop();
        }
    };
    if (need == 0) {
        auto x = ech.solve();
        if (feasible(x)) out.push_back(std::move(x));
    } else {
        rec(rec, 0, need);
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool polytope_feasible(const Polytope& poly) {
    LinearProgram lp;
    lp.num_vars = poly.num_vars;
    lp.cons = poly.cons;
    lp.lower = poly.lower;
    lp.objective.assign(size_t(poly.num_vars), Rat(0));
    return lp_solve(lp).status == LpStatus::Optimal;
}

std::string dump_lp(const LinearProgram& lp) {
    std::ostringstream os;
    auto name = [&](int i) {
        return i < int(lp.var_names.size()) && !lp.var_names[size_t(i)].empty()
                   ? lp.var_names[size_t(i)]
                   : "x" + std::to_string(i);
    };
    os << "max";
    for (int i = 0; i < lp.num_vars; ++i)
        if (!lp.objective.empty() && lp.objective[size_t(i)] != 0)
            os << " " << rat_to_string(lp.objective[size_t(i)]) << "*" << name(i);
    os << "\n";
    for (const auto& c : lp.cons) {
        bool first = true;
        for (int i = 0; i < lp.num_vars; ++i) {
            if (c.a[size_t(i)] == 0) continue;
            os << (first ? "" : " + ") << rat_to_string(c.a[size_t(i)]) << "*" << name(i);
            first = false;
        }
        if (first) os << "0";
        os << (c.rel == Rel::Le ? " <= " : c.rel == Rel::Eq ? " = " : " >= ")
           << rat_to_string(c.rhs) << "\n";
    }
    for (int i = 0; i < lp.num_vars; ++i) {
        auto lo = lower_of(lp.lower, i);
        if (lo)
            os << name(i) << " >= " << rat_to_string(*lo) << "\n";
        else
            os << name(i) << " free\n";
    }
    return os.str();
}

int matrix_rank(std::vector<std::vector<Rat>> m) {
    if (m.empty()) return 0;
    size_t cols = m[0].size();
    int rank = 0;
    size_t row = 0;
    for (size_t c = 0; c < cols && row < m.size(); ++c) {
        size_t sel = row;
        while (sel < m.size() && m[sel][c] == 0) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[sel], m[row]);
        for (size_t i = 0; i < m.size(); ++i) {
            if (i == row || m[i][c] == 0) continue;
            Rat f = m[i][c] / m[row][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[row][j];
        }
        ++row;
        ++rank;
    }
    return rank;
}

std::optional<std::vector<Rat>> solve_unique(std::vector<std::vector<Rat>> a,
                                             std::vector<Rat> b) {
    size_t nrows = a.size();
    if (nrows == 0) return std::nullopt;
    size_t d = a[0].size();
    Echelon ech{int(d)};
    for (size_t i = 0; i < nrows; ++i) {
        std::vector<Rat> row = a[i];
        row.push_back(b[i]);
        int v = ech.reduce(row);
        if (v < 0) return std::nullopt;
        if (v > 0) ech.push(std::move(row));
    }
    if (int(ech.rows.size()) != int(d)) return std::nullopt;
    return ech.solve();
}

std::optional<std::vector<Rat>> kernel_vector(const std::vector<std::vector<Rat>>& rows) {
    // Coefficients c (not all zero) with sum_i c_i * rows[i] = 0.
    size_t k = rows.size();
    if (k == 0) return std::nullopt;
    size_t d = rows[0].size();
    // Transpose: solve A^T c = 0.
    std::vector<std::vector<Rat>> m(d, std::vector<Rat>(k, Rat(0)));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < d; ++j) m[j][i] = rows[i][j];
    // Gauss-Jordan; track pivot column per row.
    std::vector<int> pivot_col;
    size_t row = 0;
    for (size_t c = 0; c < k && row < d; ++c) {
        size_t sel = row;
        while (sel < d && m[sel][c] == 0) ++sel;
        if (sel == d) continue;
        std::swap(m[sel], m[row]);
        Rat p = m[row][c];
        for (size_t j = 0; j < k; ++j) m[row][j] /= p;
        for (size_t i = 0; i < d; ++i) {
            if (i == row || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (size_t j = 0; j < k; ++j) m[i][j] -= f * m[row][j];
        }
        pivot_col.push_back(int(c));
        ++row;
    }
    if (pivot_col.size() == k) return std::nullopt;  // full column rank
    // First free column yields a kernel vector.
    std::vector<bool> is_pivot(k, false);
    for (int c : pivot_col) is_pivot[size_t(c)] = true;
    size_t free_c = 0;
    while (is_pivot[free_c]) ++free_c;
    std::vector<Rat> c(k, Rat(0));
    c[free_c] = 1;
    for (size_t i = 0; i < pivot_col.size(); ++i)
        c[size_t(pivot_col[i])] = -m[i][free_c];
    return c;
}

}  // namespace psm
