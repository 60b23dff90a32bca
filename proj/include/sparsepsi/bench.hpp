#pragma once

#include <sparsepsi/detect.hpp>
#include <sparsepsi/types.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sparsepsi {

/// Gaussian design N(0, Σ) with Σ_jk = ρ^|j−k| (ρ = 0 is the identity).
struct DesignSpec
{
    Index n = 100;
    Index p = 100;
    double rho = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One of the nine simulation models:
///   1  Y = X1 + X5 + ε
///   2  Y = 0.6 X1X2 + 0.8 X4X5 + ε
///   3  Y = 0.6 X1X2 + 0.8 X2X3 + ε
///   4  Y = 0.5 X1² + 0.9 X5X8 + ε
///   5  Y = X1² + X5X8 + X9² + ε
///   6  Y = X1 + X5 + X1X5 + ε
///   7  Y = 0.1 X1 + 0.1 X5 + X1X5 + ε
///   8  Y = X1X5 + X2X3·ε
///   9  Y = Σ_{j=1..9} XjX(j+1) + ε
/// with ε ~ N(0, noise_sd²).
struct ModelSpec
{
    int model_id = 1;
    double noise_sd = 1.0;

    /// Interaction pairs of the mean function (0-based, i <= j). Model 8's
    /// noise-multiplying pair (2,3) is not included.
    PairSet truth() const;

    /// Smallest p the formula can be evaluated with.
    Index min_p() const;

    void validate() const;
};

Matrix toeplitz_sigma(Index p, double rho);

/// Rows drawn as L·z with L the Cholesky factor of Σ and z standard normal.
Matrix sample_design(const DesignSpec& spec);

Vector gen_response(const Matrix& X, const ModelSpec& model, std::uint64_t seed);

struct Rates
{
    std::optional<double> tpr; ///< empty when the truth set is empty
    double fpr = 0.0;
};

/// TPR = |I∩Î|/|I|, FPR = |Î∖I| / (C(d,2) + d − |I|) over unordered pairs
/// with diagonals. Throws std::invalid_argument on pairs with i > j or
/// indices outside [0, d).
Rates tpr_fpr(const PairSet& truth, const PairSet& selected, Index d);

/// Number of unordered pairs (diagonal included) outside the truth set.
std::size_t negative_pair_count(std::size_t truth_size, Index d);

struct ReplicationRecord
{
    int rep = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::optional<double> tpr;
    double fpr = 0.0;
    double time = 0.0;  ///< seconds spent in fit_pipeline
    double lambda = 0.0;
    std::size_t support_size = 0;
    bool converged = false;
    int iterations = 0;
    bool hit_noise_pair = false; ///< Model 8 only: (2,3) selected
    PairSet selected;
};

struct MetricsReport
{
    std::optional<double> tpr_mean;
    std::optional<double> tpr_se;
    double fpr_mean = 0.0;
    double fpr_se = 0.0;
    double time_mean = 0.0;
    double time_sd = 0.0;
    int failures = 0;
    std::vector<ReplicationRecord> records;
};

/// Called once per successful replication with the generated data and the
/// fit. Invocations are serialized but may come from worker threads.
using ReplicationObserver =
    std::function<void(int rep, const DataSet& data, const FitResult& fit)>;

/// Replication r uses seed design.seed + r for all of its randomness.
/// Replications run on up to `jobs` threads; the report is ordered by rep
/// index and does not depend on scheduling.
MetricsReport run_experiment(const DesignSpec& design, const ModelSpec& model, int reps,
                             const FitOptions& method, int jobs = 1,
                             const ReplicationObserver& observer = {});

/// Seeds for the streams inside one replication.
struct ReplicationSeeds
{
    std::uint64_t design;
    std::uint64_t noise;
    std::uint64_t folds;
};

ReplicationSeeds replication_seeds(std::uint64_t seed);

/// One synthetic data set drawn with replication_seeds(seed); columns are
/// named x1..xp.
DataSet simulate(Index n, Index p, double rho, const ModelSpec& model, std::uint64_t seed);

} // namespace sparsepsi
