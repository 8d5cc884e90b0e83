#pragma once

#include <cstdint>

#include "psm/reductions.hpp"
#include "psm/typed.hpp"

namespace psm {

// Seeded random fixtures on a rational grid; identical seeds give identical
// instances byte for byte.
Instance gen_instance(int n, int worlds, std::uint64_t seed, int grid = 60);

TypedInstance gen_typed_instance(int types, int worlds, std::uint64_t seed,
                                 int max_size = 4, int grid = 60);

// Restricted SMTI shape: ties only on side A, length two, disjoint from the
// ranked list.
SmtiInstance gen_smti_instance(int n, std::uint64_t seed);

}  // namespace psm
