#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <vector>

namespace sparsepsi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// An (i, j) position in a p×p matrix, 0-based. Interaction pairs are
/// normalized so that i <= j; file formats use 1-based indices.
struct IndexPair
{
    Index i = 0;
    Index j = 0;

    friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
    friend bool operator==(const IndexPair&, const IndexPair&) = default;

    IndexPair normalized() const { return i <= j ? *this : IndexPair{j, i}; }
};

using PairSet = std::vector<IndexPair>;

} // namespace sparsepsi
