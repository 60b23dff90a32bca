#include <sparsepsi/detect.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sparsepsi {

PairSet upper_support(const Matrix& m)
{
    PairSet out;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = i; j < m.cols(); ++j)
            if (m(i, j) != 0.0)
                out.push_back({i, j});
    return out;
}

PsiEstimate symmetrize_and_extract(const Matrix& phi_hat, double lambda,
                                   std::vector<std::string> names)
{
    if (phi_hat.rows() != phi_hat.cols())
        throw std::invalid_argument("symmetrize: matrix must be square");
    PsiEstimate est;
    est.psi_hat = 0.5 * (phi_hat + phi_hat.transpose());
    est.support = upper_support(est.psi_hat);
    est.lambda = lambda;
    est.variable_names = std::move(names);
    return est;
}

Matrix symmetric_pinv(const Matrix& S, double rel_cutoff)
{
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("pseudo-inverse: eigendecomposition failed");
    const Vector& values = eig.eigenvalues();
    const double top = values.cwiseAbs().maxCoeff();
    if (!(top > 0.0))
        throw std::invalid_argument("pseudo-inverse: matrix is entirely zero");
    const double cutoff = rel_cutoff * top;
    Vector inv = values.unaryExpr([cutoff](double v) { return v > cutoff ? 1.0 / v : 0.0; });
    const Matrix& V = eig.eigenvectors();
    return V * inv.asDiagonal() * V.transpose();
}

ScreenReport prescreen(const DataSet& data, Index keep)
{
    data.validate();
    const Index p = data.p();
    if (keep < 1 || keep > p)
        throw std::invalid_argument("prescreen: keep must be in [1, p]");

    const MomentPair m = compute_moments(data);
    if (m.S.isZero(0.0))
        throw std::invalid_argument("prescreen: S is entirely zero");
    const Matrix S_pinv = symmetric_pinv(m.S, 1e-10 * static_cast<double>(p));
    const Matrix plug_in = S_pinv * m.Q * S_pinv;

    ScreenReport report;
    report.keep = keep;
    report.scores = plug_in.cwiseAbs().colwise().sum().transpose();

    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return report.scores(a) > report.scores(b);
    });
    report.kept.assign(order.begin(), order.begin() + keep);
    std::sort(report.kept.begin(), report.kept.end());
    return report;
}

FitResult fit_pipeline(const DataSet& data, const FitOptions& options)
{
    data.validate();
    FitResult result;

    DataSet work = options.standardize ? standardize(data) : data;
    const Index p_full = data.p();

    if (options.screen_keep) {
        result.screen = prescreen(work, *options.screen_keep);
        result.columns = result.screen->kept;
        work = work.select_columns(result.columns);
    } else {
        result.columns.resize(static_cast<std::size_t>(p_full));
        std::iota(result.columns.begin(), result.columns.end(), Index{0});
    }

    result.moments = compute_moments(work);
    SolverConfig cfg = options.solver;

    if (options.fixed_lambda) {
        cfg.validate();
        result.report = solve(result.moments, cfg);
    } else {
        result.path = lambda_path(result.moments, options.cv.grid_size, options.cv.span);
        result.cv = cv_select(work, result.path, options.cv.folds, options.cv.seed, cfg);
        LambdaPath prefix;
        prefix.anchor = result.path.anchor;
        prefix.values.assign(result.path.values.begin(),
                             result.path.values.begin() +
                                 static_cast<std::ptrdiff_t>(result.cv->selected_index + 1));
        auto reports = solve_path(result.moments, prefix, cfg);
        result.report = std::move(reports.back());
        cfg.lambda = result.cv->selected_lambda;
    }

    const PsiEstimate local = symmetrize_and_extract(result.report.state.phi, cfg.lambda);

    PsiEstimate& est = result.estimate;
    est.lambda = cfg.lambda;
    est.variable_names = data.names;
    est.psi_hat = Matrix::Zero(p_full, p_full);
    const auto& cols = result.columns;
    for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
            est.psi_hat(cols[a], cols[b]) =
                local.psi_hat(static_cast<Index>(a), static_cast<Index>(b));
    est.support = upper_support(est.psi_hat);
    return result;
}

} // namespace sparsepsi
