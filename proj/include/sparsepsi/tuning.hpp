#pragma once

#include <sparsepsi/moments.hpp>
#include <sparsepsi/solver.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sparsepsi {

/// Strictly decreasing penalty levels; `anchor` records √(log p / n).
struct LambdaPath
{
    std::vector<double> values;
    double anchor = 0.0;

    bool anchor_in_range() const;
};

/// `grid_size` log-spaced values from max|Q_jk| (the smallest λ at which the
/// zero matrix is optimal) down to max|Q_jk| / span.
/// Throws std::invalid_argument for grid_size < 2, span <= 1 or Q = 0.
LambdaPath lambda_path(const MomentPair& moments, std::size_t grid_size = 20, double span = 100.0);

struct Fold
{
    std::vector<Index> train;
    std::vector<Index> validation;
};

/// Shuffled K-fold partition of {0..n-1}; fold sizes differ by at most one
/// and the first n mod K folds take the extra row. Indices inside each fold
/// are sorted.
std::vector<Fold> kfold_split(Index n, int K, std::uint64_t seed);

/// tr(ΦᵀS_vΦS_v)/2 − tr(ΦQ_v) on held-out moments.
double validation_loss(const Matrix& phi, const MomentPair& validation);

/// Solves at every λ of the path in order, warm-starting each solve from the
/// previous solution. Reports are index-aligned with path.values.
std::vector<SolveReport> solve_path(const MomentPair& moments, const LambdaPath& path,
                                    const SolverConfig& cfg);

struct CvSettings
{
    int folds = 10;
    std::size_t grid_size = 20;
    double span = 100.0;
    std::uint64_t seed = 0;
};

struct CvResult
{
    std::vector<double> lambdas;
    Matrix fold_loss;          ///< folds × lambdas; NaN rows for failed folds
    std::vector<double> mean;  ///< over successful folds
    std::vector<double> se;
    std::size_t selected_index = 0;
    double selected_lambda = 0.0;
    std::string rule = "min-mean-loss, ties to larger lambda";
    std::vector<int> failed_folds;
    std::vector<std::string> warnings;
};

/// K-fold selection of λ. Each training fold is centered with its own
/// means; the validation fold is centered with the training means.
/// Throws std::runtime_error if every fold fails.
CvResult cv_select(const DataSet& data, const LambdaPath& path, int K, std::uint64_t seed,
                   const SolverConfig& cfg);

} // namespace sparsepsi
