#pragma once

#include <cstdint>
#include <span>

namespace maxent::qmc {

// Two distinct published extensible base-2 lattice sequences (up to 2^20
// points), so that building the surrogate and integrating its entropy never
// share a lattice. Copies live under data/ in the generating-vector file format.

/// Used to place prior points. 256 components.
std::span<const std::uint32_t> surrogate_generating_vector();

/// Used by the Moebius cubature. 10 components.
std::span<const std::uint32_t> cubature_generating_vector();

}  // namespace maxent::qmc
