#include "psm/gen.hpp"

#include <algorithm>
#include <random>

#include "psm/errors.hpp"

namespace psm {

namespace {

Rat grid_rat(std::mt19937_64& rng, int grid) {
    // uniform on { k/grid : |k| <= 2*grid }
    std::uniform_int_distribution<int> d(-2 * grid, 2 * grid);
    return Rat(d(rng), grid);
}

std::vector<Rat> random_prior(std::mt19937_64& rng, int worlds) {
    std::uniform_int_distribution<int> d(1, 20);
    std::vector<Rat> w(size_t(worlds), Rat(0));
    Rat tot = 0;
    for (auto& v : w) {
        v = Rat(d(rng));
        tot += v;
    }
    for (auto& v : w) v /= tot;
    return w;
}

std::vector<std::vector<std::vector<Rat>>> random_cube(std::mt19937_64& rng, int r,
                                                       int c, int worlds, int grid) {
    std::vector<std::vector<std::vector<Rat>>> cube;
    for (int i = 0; i < r; ++i) {
        cube.push_back({});
        for (int j = 0; j < c; ++j) {
            cube.back().push_back({});
            for (int w = 0; w < worlds; ++w) cube.back().back().push_back(grid_rat(rng, grid));
        }
    }
    return cube;
}

}  // namespace

Instance gen_instance(int n, int worlds, std::uint64_t seed, int grid) {
    if (n < 1 || worlds < 1 || grid < 1) throw InputError("generator sizes must be positive");
    std::mt19937_64 rng(seed);
    Instance inst;
    for (int w = 0; w < worlds; ++w) inst.worlds.push_back("w" + std::to_string(w + 1));
    inst.prior = random_prior(rng, worlds);
    for (int i = 0; i < n; ++i) inst.side_a.push_back("a" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) inst.side_b.push_back("b" + std::to_string(i + 1));
    inst.val_a = random_cube(rng, n, n, worlds, grid);
    inst.val_b = random_cube(rng, n, n, worlds, grid);
    inst.util = random_cube(rng, n, n, worlds, grid);
    inst.validate();
    return inst;
}

TypedInstance gen_typed_instance(int types, int worlds, std::uint64_t seed, int max_size,
                                 int grid) {
    if (types < 1 || worlds < 1 || max_size < 1)
        throw InputError("generator sizes must be positive");
    std::mt19937_64 rng(seed);
    TypedInstance ti;
    for (int w = 0; w < worlds; ++w) ti.worlds.push_back("w" + std::to_string(w + 1));
    ti.prior = random_prior(rng, worlds);
    for (int t = 0; t < types; ++t) {
        ti.a_types.push_back("A" + std::to_string(t + 1));
        ti.b_types.push_back("B" + std::to_string(t + 1));
    }
    std::uniform_int_distribution<int> sz(1, max_size);
    // draw sizes until both sides balance; bounded ranges make this quick
    for (;;) {
        std::vector<Int> sa, sb;
        int ta = 0, tb = 0;
        for (int t = 0; t < types; ++t) {
            int v = sz(rng);
            sa.push_back(Int(v));
            ta += v;
        }
        for (int t = 0; t < types; ++t) {
            int v = sz(rng);
            sb.push_back(Int(v));
            tb += v;
        }
        if (ta != tb) continue;
        ti.a_sizes = std::move(sa);
        ti.b_sizes = std::move(sb);
        break;
    }
    ti.val_a = random_cube(rng, types, types, worlds, grid);
    ti.val_b = random_cube(rng, types, types, worlds, grid);
    ti.util = random_cube(rng, types, types, worlds, grid);
    ti.validate();
    return ti;
}

SmtiInstance gen_smti_instance(int n, std::uint64_t seed) {
    if (n < 1) throw InputError("generator sizes must be positive");
    std::mt19937_64 rng(seed);
    SmtiInstance m;
    for (int i = 0; i < n; ++i) m.side_a.push_back("a" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) m.side_b.push_back("b" + std::to_string(i + 1));
    auto random_list = [&](int exclude_chance_pct) {
        std::vector<int> all(size_t(n), 0);
        std::iota(all.begin(), all.end(), 0);
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<int> lst;
        std::uniform_int_distribution<int> pct(0, 99);
        for (int y : all)
            if (pct(rng) >= exclude_chance_pct) lst.push_back(y);
        return lst;
    };
    for (int i = 0; i < n; ++i) m.prefs_a.push_back(random_list(30));
    for (int i = 0; i < n; ++i) m.prefs_b.push_back(random_list(30));
    m.ties_a.assign(size_t(n), {});
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < n; ++i) {
        if (coin(rng) == 0) continue;
        // tie members must be outside the ranked list
        std::vector<int> outside;
        for (int y = 0; y < n; ++y)
            if (std::find(m.prefs_a[size_t(i)].begin(), m.prefs_a[size_t(i)].end(), y) ==
                m.prefs_a[size_t(i)].end())
                outside.push_back(y);
        if (outside.size() < 2) continue;
        std::shuffle(outside.begin(), outside.end(), rng);
        m.ties_a[size_t(i)] = {outside[0], outside[1]};
        std::sort(m.ties_a[size_t(i)].begin(), m.ties_a[size_t(i)].end());
    }
    m.validate();
    return m;
}

}  // namespace psm
