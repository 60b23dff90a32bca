#pragma once

#include <sparsepsi/types.hpp>

#include <cstdint>
#include <random>

namespace sparsepsi {

using Engine = std::mt19937_64;

/// Independent seed for a named sub-stream of a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// rows×cols matrix of i.i.d. standard normal draws, filled row by row.
Matrix standard_normal(Index rows, Index cols, Engine& engine);

} // namespace sparsepsi
