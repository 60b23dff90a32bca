#include <sparsepsi/solver.hpp>

#include <chrono>
#include <cmath>
#include <sstream>

namespace sparsepsi {

void SolverConfig::validate() const
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("solver: lambda must be > 0");
    if (!(rho > 0.0))
        throw std::invalid_argument("solver: rho must be > 0");
    if (!(tau_scale > 1.0))
        throw std::invalid_argument("solver: tau_scale must be > 1");
    if (!(tol > 0.0))
        throw std::invalid_argument("solver: tol must be > 0");
    if (max_iter < 1)
        throw std::invalid_argument("solver: max_iter must be >= 1");
    if (power_iters < 1 || !(power_tol > 0.0))
        throw std::invalid_argument("solver: invalid power iteration controls");
}

SolverState SolverState::zeros(Index p)
{
    SolverState s;
    s.psi = Matrix::Zero(p, p);
    s.phi = Matrix::Zero(p, p);
    s.dual = Matrix::Zero(p, p);
    return s;
}

SolverDivergence::SolverDivergence(int iteration, const std::string& what)
    : std::runtime_error(what), iteration_(iteration)
{}

SpectralEstimate spectral_radius(const Matrix& S, int max_iters, double tol)
{
    const Index p = S.rows();
    SpectralEstimate est;
    if (p == 0)
        return est;

    Vector v = Vector::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
    Vector w(p);
    double mu = 0.0;
    for (int k = 1; k <= max_iters; ++k) {
        w.noalias() = S * v;
        const double next = v.dot(w);
        const double norm = w.norm();
        est.iterations = k;
        if (norm == 0.0) {
            // start vector lies in the null space
            if (S.isZero(0.0)) {
                est.value = 0.0;
                est.converged = true;
                return est;
            }
            break;
        }
        v = w / norm;
        if (k > 1 && std::abs(next - mu) <= tol * std::abs(next)) {
            est.value = next;
            est.converged = true;
            return est;
        }
        mu = next;
    }
    est.value = S.trace();
    est.converged = false;
    return est;
}

Matrix shrinkage(const Matrix& A, double t)
{
    return A.unaryExpr([t](double a) { return soft_threshold(a, t); });
}

namespace {

// Ψ-update with the curvature term SΨᵗS already formed.
void psi_step(const MomentPair& m, const Matrix& dual, const Matrix& phi, const Matrix& psi,
              const Matrix& curvature, double rho, double tau, Matrix& out)
{
    const double step = 1.0 / (rho + tau);
    out = (m.Q - dual + rho * phi + tau * psi - curvature) * step;
}

void phi_step(const Matrix& psi_next, const Matrix& dual, double rho, double lambda, Matrix& out)
{
    const double t = lambda / rho;
    out = (psi_next + dual / rho).unaryExpr([t](double a) { return soft_threshold(a, t); });
}

Matrix sandwich(const Matrix& S, const Matrix& M)
{
    Matrix tmp(S.rows(), M.cols());
    tmp.noalias() = S * M;
    Matrix out(S.rows(), S.cols());
    out.noalias() = tmp * S;
    return out;
}

} // namespace

Matrix psi_update(const SolverState& state, const MomentPair& moments, const SolverConfig& cfg,
                  double tau)
{
    Matrix out;
    psi_step(moments, state.dual, state.phi, state.psi, sandwich(moments.S, state.psi), cfg.rho,
             tau, out);
    return out;
}

Matrix phi_update(const Matrix& psi_next, const Matrix& dual, const SolverConfig& cfg)
{
    Matrix out;
    phi_step(psi_next, dual, cfg.rho, cfg.lambda, out);
    return out;
}

Matrix dual_update(const Matrix& dual, const Matrix& psi_next, const Matrix& phi_next, double rho)
{
    return dual + rho * (psi_next - phi_next);
}

Residuals residuals(const SolverState& prev, const SolverState& next)
{
    Residuals r;
    r.eta_primal = (next.psi - next.phi).norm();
    r.eta_dual = std::max({(next.psi - prev.psi).norm(), (next.phi - prev.phi).norm(),
                           (next.dual - prev.dual).norm()});
    return r;
}

double quadratic_loss(const Matrix& psi, const MomentPair& moments)
{
    const Matrix curvature = sandwich(moments.S, psi);
    return 0.5 * psi.cwiseProduct(curvature).sum() - psi.cwiseProduct(moments.Q.transpose()).sum();
}

double penalized_objective(const Matrix& psi, const MomentPair& moments, double lambda)
{
    return quadratic_loss(psi, moments) + lambda * psi.cwiseAbs().sum();
}

ProximalWeight proximal_weight(const MomentPair& moments, const SolverConfig& cfg)
{
    ProximalWeight w;
    w.spectral = spectral_radius(moments.S, cfg.power_iters, cfg.power_tol);
    w.tau = cfg.tau_scale * w.spectral.value * w.spectral.value;
    return w;
}

SolveReport solve(const MomentPair& moments, const SolverConfig& cfg,
                  const std::optional<SolverState>& init)
{
    cfg.validate();
    return solve(moments, cfg, proximal_weight(moments, cfg), init);
}

SolveReport solve(const MomentPair& moments, const SolverConfig& cfg, const ProximalWeight& weight,
                  const std::optional<SolverState>& init)
{
    cfg.validate();
    const Index p = moments.p;
    if (moments.S.rows() != p || moments.S.cols() != p || moments.Q.rows() != p ||
        moments.Q.cols() != p)
        throw std::invalid_argument("solve: moment matrices must be p×p");

    const auto start = std::chrono::steady_clock::now();

    SolveReport report;
    report.tau = weight.tau;
    report.spectral_fallback = !weight.spectral.converged;

    SolverState cur = init ? *init : SolverState::zeros(p);
    if (cur.psi.rows() != p || cur.phi.rows() != p || cur.dual.rows() != p || cur.psi.cols() != p ||
        cur.phi.cols() != p || cur.dual.cols() != p)
        throw std::invalid_argument("solve: initial state has wrong shape");
    cur.iter = 0;

    // Zero satisfies the optimality conditions once λ >= max|Q|, and
    // (Ψ, Φ, Λ) = (0, 0, Q) is then a fixed point of the iteration. Iterating
    // from elsewhere can leave round-off sized entries in Φ at tol.
    if (cfg.lambda >= moments.Q.cwiseAbs().maxCoeff()) {
        cur.psi.setZero();
        cur.phi.setZero();
        cur.dual = moments.Q;
        cur.eta_primal = cur.eta_dual = cur.objective = 0.0;
        report.converged = true;
        report.state = std::move(cur);
        report.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    }

    const double rho = cfg.rho;
    const double tau = weight.tau;

    SolverState next = cur;
    Matrix curvature = sandwich(moments.S, cur.psi);
    Matrix tmp(p, p);
    report.history.reserve(static_cast<std::size_t>(std::min(cfg.max_iter, 4096)));

    const double step = 1.0 / (rho + tau);
    const double thresh = cfg.lambda / rho;
    const Index size = p * p;

    for (int t = 1; t <= cfg.max_iter; ++t) {
        // One pass for the three block updates and the residual sums. The
        // arithmetic per entry matches psi_update, phi_update, dual_update.
        const double* q = moments.Q.data();
        const double* c = curvature.data();
        const double* psi0 = cur.psi.data();
        const double* phi0 = cur.phi.data();
        const double* lam0 = cur.dual.data();
        double* psi1 = next.psi.data();
        double* phi1 = next.phi.data();
        double* lam1 = next.dual.data();
        double gap2 = 0.0, dpsi2 = 0.0, dphi2 = 0.0, dlam2 = 0.0, linear = 0.0, l1 = 0.0;
        for (Index k = 0; k < size; ++k) {
            const double a = (q[k] - lam0[k] + rho * phi0[k] + tau * psi0[k] - c[k]) * step;
            const double b = soft_threshold(a + lam0[k] / rho, thresh);
            const double l = lam0[k] + rho * (a - b);
            psi1[k] = a;
            phi1[k] = b;
            lam1[k] = l;
            gap2 += (a - b) * (a - b);
            dpsi2 += (a - psi0[k]) * (a - psi0[k]);
            dphi2 += (b - phi0[k]) * (b - phi0[k]);
            dlam2 += (l - lam0[k]) * (l - lam0[k]);
            linear += a * q[k];
            l1 += std::abs(b);
        }

        // a non-finite Ψ or Λ entry makes its squared change non-finite
        if (!std::isfinite(dpsi2) || !std::isfinite(dlam2)) {
            std::ostringstream os;
            os << "solver diverged: non-finite iterate at iteration " << t << " (lambda=" << cfg.lambda
               << ", tau=" << tau << ")";
            throw SolverDivergence(t, os.str());
        }

        tmp.noalias() = moments.S * next.psi;
        curvature.noalias() = tmp * moments.S;

        Residuals r;
        r.eta_primal = std::sqrt(gap2);
        r.eta_dual = std::sqrt(std::max({dpsi2, dphi2, dlam2}));
        next.iter = t;
        next.eta_primal = r.eta_primal;
        next.eta_dual = r.eta_dual;
        next.objective = 0.5 * next.psi.cwiseProduct(curvature).sum() - linear + cfg.lambda * l1;
        report.history.push_back({r.eta_primal, r.eta_dual, next.objective});

        std::swap(cur, next);
        if (std::max(r.eta_primal, r.eta_dual) <= cfg.tol) {
            report.converged = true;
            break;
        }
    }

    report.state = std::move(cur);
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace sparsepsi
