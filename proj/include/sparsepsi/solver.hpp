#pragma once

#include <sparsepsi/moments.hpp>
#include <sparsepsi/types.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsepsi {

/**
 * Controls for the proximal ADMM that minimizes
 *
 *     tr(ΨᵀSΨS)/2 − tr(ΨQ) + λ‖Ψ‖₁
 *
 * through the split Ψ = Φ. The proximal weight is τ = tau_scale·λ_max(S)²,
 * which dominates the largest eigenvalue of the Hessian S⊗S.
 */
struct SolverConfig
{
    double lambda = 0.0;
    double rho = 1.0;
    double tau_scale = 1.01;
    double tol = 1e-3;        ///< stop once max(η_P, η_D) <= tol
    int max_iter = 10000;
    int power_iters = 1000;
    double power_tol = 1e-10;

    /// Throws std::invalid_argument on lambda <= 0, rho <= 0,
    /// tau_scale <= 1, tol <= 0 or max_iter < 1.
    void validate() const;
};

/// The ADMM triple: Ψ (smooth block), Φ (ℓ1 block, carries exact zeros)
/// and the dual Λ.
struct SolverState
{
    Matrix psi;
    Matrix phi;
    Matrix dual;
    int iter = 0;
    double eta_primal = 0.0;
    double eta_dual = 0.0;
    double objective = 0.0;

    static SolverState zeros(Index p);
};

struct ResidualRecord
{
    double eta_primal;
    double eta_dual;
    double objective;
};

struct SolveReport
{
    SolverState state;
    bool converged = false;
    std::vector<ResidualRecord> history;
    double tau = 0.0;
    double wall_time = 0.0;       ///< seconds
    bool spectral_fallback = false; ///< power iteration missed power_tol; τ from trace(S)
};

struct SpectralEstimate
{
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Thrown when an iterate stops being finite.
class SolverDivergence : public std::runtime_error
{
public:
    SolverDivergence(int iteration, const std::string& what);
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from the
/// normalized all-ones vector. Stops when the Rayleigh quotient changes by
/// less than `tol` relative. On failure `converged` is false and `value`
/// holds trace(S), an upper bound for PSD input.
SpectralEstimate spectral_radius(const Matrix& S, int max_iters = 1000, double tol = 1e-10);

/// sign(a)·max(0, |a| − t). Returns +0.0 exactly when |a| <= t.
inline double soft_threshold(double a, double t)
{
    const double m = std::abs(a) - t;
    return m > 0.0 ? std::copysign(m, a) : 0.0;
}

Matrix shrinkage(const Matrix& A, double t);

/// Ψ^{t+1} = (Q − Λᵗ + ρΦᵗ + τΨᵗ − SΨᵗS) / (ρ + τ): the minimizer of the
/// Ψ-subproblem after adding ½‖vec(Ψ − Ψᵗ)‖²_G with G = τI − S⊗S.
Matrix psi_update(const SolverState& state, const MomentPair& moments,
                  const SolverConfig& cfg, double tau);

/// Φ^{t+1} = shrinkage(Ψ^{t+1} + Λᵗ/ρ, λ/ρ).
Matrix phi_update(const Matrix& psi_next, const Matrix& dual, const SolverConfig& cfg);

/// Λ^{t+1} = Λᵗ + ρ(Ψ^{t+1} − Φ^{t+1}).
Matrix dual_update(const Matrix& dual, const Matrix& psi_next, const Matrix& phi_next, double rho);

struct Residuals
{
    double eta_primal;
    double eta_dual;
};

/// η_P = ‖Ψ − Φ‖_F of `next`; η_D = the largest Frobenius change among the
/// three blocks between `prev` and `next`.
Residuals residuals(const SolverState& prev, const SolverState& next);

/// tr(ΨᵀSΨS)/2 − tr(ΨQ) + λ‖Ψ‖₁ at a single matrix.
double penalized_objective(const Matrix& psi, const MomentPair& moments, double lambda);

/// Unpenalized part tr(ΨᵀSΨS)/2 − tr(ΨQ).
double quadratic_loss(const Matrix& psi, const MomentPair& moments);

/**
 * Runs the three-block iteration from `init` (all zeros when absent) until
 * max(η_P, η_D) <= cfg.tol or cfg.max_iter iterations. The result is a
 * deterministic function of (moments, cfg, init).
 *
 * Throws SolverDivergence if an iterate becomes non-finite.
 */
SolveReport solve(const MomentPair& moments, const SolverConfig& cfg,
                  const std::optional<SolverState>& init = std::nullopt);

} // namespace sparsepsi

namespace sparsepsi {

/// τ = tau_scale·λ_max(S)² together with the spectral diagnostics.
struct ProximalWeight
{
    double tau = 0.0;
    SpectralEstimate spectral;
};

ProximalWeight proximal_weight(const MomentPair& moments, const SolverConfig& cfg);

/// As solve(), with τ supplied by the caller (path solves reuse one τ).
SolveReport solve(const MomentPair& moments, const SolverConfig& cfg,
                  const ProximalWeight& weight,
                  const std::optional<SolverState>& init = std::nullopt);

} // namespace sparsepsi
