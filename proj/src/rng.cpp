#include <sparsepsi/rng.hpp>

namespace sparsepsi {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Matrix standard_normal(Index rows, Index cols, Engine& engine)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            z(i, j) = normal(engine);
    return z;
}

} // namespace sparsepsi
