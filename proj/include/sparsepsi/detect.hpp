#pragma once

#include <sparsepsi/moments.hpp>
#include <sparsepsi/solver.hpp>
#include <sparsepsi/tuning.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sparsepsi {

/// Symmetric estimate and its detected interactions {(i, j): ψ̂_ij ≠ 0, i <= j}.
struct PsiEstimate
{
    Matrix psi_hat;
    PairSet support;
    double lambda = 0.0;
    std::vector<std::string> variable_names;
};

/// Exact nonzeros of the upper triangle (diagonal included), row-major order.
PairSet upper_support(const Matrix& m);

/// psi_hat = (Φ̂ + Φ̂ᵀ)/2, which is exactly symmetric in floating point.
PsiEstimate symmetrize_and_extract(const Matrix& phi_hat, double lambda,
                                   std::vector<std::string> names = {});

struct ScreenReport
{
    std::vector<Index> kept; ///< sorted, 0-based
    Vector scores;           ///< ‖Ψ̃_{·j}‖₁ for every column
    Index keep = 0;
};

/// Moore–Penrose pseudo-inverse of a symmetric matrix; eigenvalues at or
/// below rel_cutoff·λ_max count as zero.
Matrix symmetric_pinv(const Matrix& S, double rel_cutoff);

/// Plug-in screen: Ψ̃ = S⁺QS⁺ and keep the `keep` columns with the largest
/// ℓ1 norms (ties to the lower index).
ScreenReport prescreen(const DataSet& data, Index keep);

struct FitOptions
{
    SolverConfig solver;            ///< solver.lambda is used when `fixed_lambda` is set
    bool fixed_lambda = false;
    CvSettings cv;
    std::optional<Index> screen_keep;
    bool standardize = false;
};

struct FitResult
{
    PsiEstimate estimate;           ///< in original column positions
    SolveReport report;             ///< the final solve on the (screened) problem
    MomentPair moments;             ///< of the (screened) problem
    std::vector<Index> columns;     ///< original index of each screened column
    std::optional<CvResult> cv;
    std::optional<ScreenReport> screen;
    LambdaPath path;
};

/// Optional prescreen, moments, CV or fixed-λ solve, symmetrization. The
/// estimate is embedded back into the full p×p index space.
FitResult fit_pipeline(const DataSet& data, const FitOptions& options);

} // namespace sparsepsi
