#pragma once

#include <cstdint>

#include "ued/dsl/program.hpp"
#include "ued/world/state.hpp"

namespace ued::dsl {

/// Initial world for `p`: base terrain, then placements in program order.
/// Deterministic in (p, rng_seed). Throws CompileError when a region has too few
/// feasible cells.
world::WorldState compile(const LevelProgram& p, std::uint64_t rng_seed);

/// Cells an annulus placement may use, in scan order (floor of the player start).
std::vector<world::CellPos> feasible_cells(const world::WorldState& s, const Annulus& a,
                                           const BlockSet& substrate);

}  // namespace ued::dsl
