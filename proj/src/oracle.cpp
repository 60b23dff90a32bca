#include <sparsepsi/oracle.hpp>

#include <sparsepsi/bench.hpp>
#include <sparsepsi/rng.hpp>

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sparsepsi {

Matrix kronecker(const Matrix& A, const Matrix& B)
{
    return Eigen::kroneckerProduct(A, B).eval();
}

namespace {

void require_oracle_size(Index p)
{
    if (p > kOracleMaxDim)
        throw std::invalid_argument("oracle: p = " + std::to_string(p) + " exceeds the dense limit of " +
                                    std::to_string(kOracleMaxDim));
}

double soft(double a, double t)
{
    return std::copysign(std::max(std::abs(a) - t, 0.0), a) + 0.0;
}

double vec_objective(const Matrix& H, const Vector& q, const Vector& x, double lambda)
{
    return 0.5 * x.dot(H * x) - q.dot(x) + lambda * x.cwiseAbs().sum();
}

} // namespace

Matrix reference_solve(const MomentPair& moments, double lambda, double tol, long max_iter)
{
    const Index p = moments.p;
    require_oracle_size(p);
    if (!(lambda > 0.0))
        throw std::invalid_argument("reference_solve: lambda must be > 0");

    const Matrix H = kronecker(moments.S, moments.S);
    // vec is column-major, matching Eigen's storage
    const Vector q = Eigen::Map<const Vector>(moments.Q.data(), p * p);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(moments.S, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double L = top * top;
    Vector x = Vector::Zero(p * p);
    if (L == 0.0)
        return Matrix::Zero(p, p); // pure ℓ1 problem: minimizer is 0 for |Q| <= λ

    const double step = 1.0 / L;
    const double t = lambda * step;
    double f = vec_objective(H, q, x, lambda);
    Vector grad(p * p);
    for (long k = 0; k < max_iter; ++k) {
        grad.noalias() = H * x;
        grad -= q;
        const Vector x_next = (x - step * grad).unaryExpr([t](double a) { return soft(a, t); });
        // L·|Δx| bounds the subgradient residual; a flat objective alone can
        // stop ISTA early on ill-conditioned S
        const double move = L * (x_next - x).cwiseAbs().maxCoeff();
        x = x_next;
        const double f_next = vec_objective(H, q, x, lambda);
        const bool done = std::abs(f - f_next) < tol && move < 1e3 * tol;
        f = f_next;
        if (done)
            break;
    }
    return Eigen::Map<const Matrix>(x.data(), p, p);
}

KktCertificate kkt_check(const Matrix& psi, const MomentPair& moments, double lambda, double tol)
{
    const Matrix G = moments.S * psi * moments.S - moments.Q;
    KktCertificate cert;
    cert.lambda = lambda;
    cert.tol = tol;
    for (Index i = 0; i < psi.rows(); ++i) {
        for (Index j = 0; j < psi.cols(); ++j) {
            const double v = psi(i, j);
            if (v != 0.0) {
                const double sign = v > 0.0 ? 1.0 : -1.0;
                cert.max_violation_on_support =
                    std::max(cert.max_violation_on_support, std::abs(G(i, j) + lambda * sign));
            } else {
                cert.max_violation_off_support =
                    std::max(cert.max_violation_off_support, std::abs(G(i, j)) - lambda);
            }
        }
    }
    cert.passed = cert.max_violation_on_support <= tol && cert.max_violation_off_support <= tol;
    return cert;
}

double kkt_tolerance(const MomentPair& moments, double solver_tol)
{
    return 10.0 * solver_tol * (1.0 + moments.S.squaredNorm());
}

double irrepresentable_diag(const Matrix& S, const PairSet& support)
{
    const Index p = S.rows();
    require_oracle_size(p);
    const Index dim = p * p;

    std::vector<char> in_support(static_cast<std::size_t>(dim), 0);
    for (const auto& q : support) {
        if (q.i < 0 || q.j < 0 || q.i >= p || q.j >= p)
            throw std::invalid_argument("irrepresentable: support position out of range");
        in_support[static_cast<std::size_t>(q.i + q.j * p)] = 1;
    }
    std::vector<Index> U, Uc;
    for (Index k = 0; k < dim; ++k)
        (in_support[static_cast<std::size_t>(k)] ? U : Uc).push_back(k);
    if (U.empty())
        throw std::invalid_argument("irrepresentable: empty support");
    if (Uc.empty())
        throw std::invalid_argument("irrepresentable: empty complement");

    const Matrix H = kronecker(S, S);
    Matrix H11(U.size(), U.size());
    Matrix H12(U.size(), Uc.size());
    for (std::size_t a = 0; a < U.size(); ++a) {
        for (std::size_t b = 0; b < U.size(); ++b)
            H11(static_cast<Index>(a), static_cast<Index>(b)) = H(U[a], U[b]);
        for (std::size_t b = 0; b < Uc.size(); ++b)
            H12(static_cast<Index>(a), static_cast<Index>(b)) = H(U[a], Uc[b]);
    }
    Eigen::FullPivLU<Matrix> lu(H11);
    if (!lu.isInvertible())
        throw std::runtime_error("irrepresentable: Lambda_11 is singular");
    const Matrix W = lu.solve(H12);
    return W.cwiseAbs().colwise().sum().maxCoeff();
}

Matrix worked_example_psi()
{
    Matrix psi = Matrix::Zero(3, 3);
    psi(0, 1) = psi(1, 0) = 1.0;
    return psi;
}

Matrix worked_example_sigma_inverse(double rho)
{
    Matrix m(3, 3);
    m << 1.0, -rho, 0.0,
        -rho, 1.0 + rho * rho, -rho,
        0.0, -rho, 1.0;
    return m / (1.0 - rho * rho);
}

double population_psi_check(double rho, Index n_mc, std::uint64_t seed)
{
    const auto seeds = replication_seeds(seed);
    DataSet data;
    data.X = sample_design({n_mc, 3, rho, seeds.design});
    Engine engine(seeds.noise);
    std::normal_distribution<double> normal(0.0, 1.0);
    data.y.resize(n_mc);
    for (Index i = 0; i < n_mc; ++i) {
        const double x1 = data.X(i, 0);
        const double x2 = data.X(i, 1);
        data.y(i) = x1 + x1 * x2 + normal(engine);
    }
    const MomentPair m = compute_moments(data);
    const Matrix S_inv = m.S.inverse();
    const Matrix plug_in = S_inv * m.Q * S_inv;
    return (plug_in - worked_example_psi()).cwiseAbs().maxCoeff();
}

} // namespace sparsepsi
