#pragma once

#include <sparsepsi/moments.hpp>
#include <sparsepsi/types.hpp>

#include <cstdint>

namespace sparsepsi {

/// Largest dimension the dense p²×p² oracles accept.
inline constexpr Index kOracleMaxDim = 50;

/// Explicit A⊗B.
Matrix kronecker(const Matrix& A, const Matrix& B);

/**
 * Minimizes ½vec(Ψ)ᵀ(S⊗S)vec(Ψ) − vec(Q)ᵀvec(Ψ) + λ‖vec(Ψ)‖₁ by proximal
 * gradient on the materialized Kronecker system with step 1/λ_max(S)².
 * Stops when the objective changes by less than `tol` between iterations
 * and the step scaled by λ_max(S)² is below 1e3·tol.
 *
 * Throws std::invalid_argument for p > kOracleMaxDim.
 */
Matrix reference_solve(const MomentPair& moments, double lambda, double tol = 1e-12,
                       long max_iter = 5'000'000);

struct KktCertificate
{
    double max_violation_on_support = 0.0;
    double max_violation_off_support = 0.0;
    double lambda = 0.0;
    double tol = 0.0;
    bool passed = false;
};

/// Subgradient optimality of ψ with G = SψS − Q: |G_ij + λ·sign(ψ_ij)| <= tol
/// where ψ_ij ≠ 0 and |G_ij| <= λ + tol elsewhere.
KktCertificate kkt_check(const Matrix& psi, const MomentPair& moments, double lambda, double tol);

/// ε_kkt = 10·tol·(1 + ‖S‖_F²), the slack a solve stopped at `solver_tol`
/// is certified against.
double kkt_tolerance(const MomentPair& moments, double solver_tol);

/// max_j ‖Λ₁₁⁻¹Λ₁₂,j‖₁ for Λ = S⊗S partitioned by membership of vec
/// positions in `support` (ordered (row, col) positions, both triangles as
/// given). Throws std::invalid_argument on an empty support or complement
/// and std::runtime_error when Λ₁₁ is singular.
double irrepresentable_diag(const Matrix& S, const PairSet& support);

/// Ψ for Y = X1 + X1X2 + ε with p = 3: a single interaction between the
/// first two variables.
Matrix worked_example_psi();

/// Closed-form inverse of the 3×3 Toeplitz matrix with parameter ρ.
Matrix worked_example_sigma_inverse(double rho);

/// Draws n_mc samples of the worked example (Toeplitz ρ design, ε ~ N(0,1))
/// and returns max |S⁻¹QS⁻¹ − Ψ| entrywise.
double population_psi_check(double rho, Index n_mc, std::uint64_t seed);

} // namespace sparsepsi
