#include <sparsepsi/tuning.hpp>

#include <sparsepsi/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparsepsi {

bool LambdaPath::anchor_in_range() const
{
    return !values.empty() && anchor <= values.front() && anchor >= values.back();
}

LambdaPath lambda_path(const MomentPair& moments, std::size_t grid_size, double span)
{
    if (grid_size < 2)
        throw std::invalid_argument("lambda path: grid_size must be >= 2");
    if (!(span > 1.0))
        throw std::invalid_argument("lambda path: span must be > 1");
    const double top = moments.Q.cwiseAbs().maxCoeff();
    if (!(top > 0.0))
        throw std::invalid_argument("degenerate problem: Q = 0");

    LambdaPath path;
    path.values.resize(grid_size);
    const double last = static_cast<double>(grid_size - 1);
    for (std::size_t k = 0; k < grid_size; ++k)
        path.values[k] = top * std::pow(span, -static_cast<double>(k) / last);
    path.values.front() = top;
    path.values.back() = top / span;
    path.anchor = std::sqrt(std::log(static_cast<double>(moments.p)) / static_cast<double>(moments.n));
    return path;
}

std::vector<Fold> kfold_split(Index n, int K, std::uint64_t seed)
{
    if (K < 2)
        throw std::invalid_argument("kfold: K must be >= 2");
    if (static_cast<Index>(K) > n)
        throw std::invalid_argument("kfold: K = " + std::to_string(K) + " exceeds n = " +
                                    std::to_string(n));

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    Engine engine(seed);
    std::shuffle(order.begin(), order.end(), engine);

    std::vector<Index> assignment(static_cast<std::size_t>(n));
    const Index base = n / K;
    const Index extra = n % K;
    Index pos = 0;
    for (int k = 0; k < K; ++k) {
        const Index size = base + (k < extra ? 1 : 0);
        for (Index s = 0; s < size; ++s)
            assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = k;
    }

    std::vector<Fold> folds(static_cast<std::size_t>(K));
    for (Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)]);
        for (std::size_t f = 0; f < folds.size(); ++f)
            (f == k ? folds[f].validation : folds[f].train).push_back(i);
    }
    return folds;
}

double validation_loss(const Matrix& phi, const MomentPair& validation)
{
    return quadratic_loss(phi, validation);
}

std::vector<SolveReport> solve_path(const MomentPair& moments, const LambdaPath& path,
                                    const SolverConfig& cfg)
{
    std::vector<SolveReport> reports;
    reports.reserve(path.values.size());
    SolverConfig step = cfg;
    step.lambda = path.values.empty() ? cfg.lambda : path.values.front();
    step.validate();
    const ProximalWeight weight = proximal_weight(moments, step);

    std::optional<SolverState> warm;
    for (double lambda : path.values) {
        step.lambda = lambda;
        reports.push_back(solve(moments, step, weight, warm));
        warm = reports.back().state;
    }
    return reports;
}

CvResult cv_select(const DataSet& data, const LambdaPath& path, int K, std::uint64_t seed,
                   const SolverConfig& cfg)
{
    data.validate();
    if (path.values.empty())
        throw std::invalid_argument("cv: empty lambda path");

    const auto folds = kfold_split(data.n(), K, seed);
    const auto L = path.values.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    CvResult result;
    result.lambdas = path.values;
    result.fold_loss = Matrix::Constant(K, static_cast<Index>(L), nan);

    for (int k = 0; k < K; ++k) {
        const Fold& fold = folds[static_cast<std::size_t>(k)];
        const DataSet train = data.select_rows(fold.train);
        const DataSet valid = data.select_rows(fold.validation);
        const Vector x_mean = column_means(train.X);
        const double y_mean = train.y.mean();
        const MomentPair train_m = compute_moments(train, x_mean, y_mean);
        const MomentPair valid_m = compute_moments(valid, x_mean, y_mean);
        try {
            const auto reports = solve_path(train_m, path, cfg);
            for (std::size_t l = 0; l < L; ++l)
                result.fold_loss(k, static_cast<Index>(l)) =
                    validation_loss(reports[l].state.phi, valid_m);
        } catch (const SolverDivergence& e) {
            result.fold_loss.row(k).setConstant(nan);
            result.failed_folds.push_back(k);
            result.warnings.push_back("fold " + std::to_string(k + 1) + " excluded: " + e.what());
        }
    }
    if (static_cast<int>(result.failed_folds.size()) == K)
        throw std::runtime_error("cv: every fold failed to solve");

    const double used = static_cast<double>(K - static_cast<int>(result.failed_folds.size()));
    result.mean.assign(L, 0.0);
    result.se.assign(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        double sum = 0.0;
        for (int k = 0; k < K; ++k) {
            const double v = result.fold_loss(k, static_cast<Index>(l));
            if (!std::isnan(v))
                sum += v;
        }
        const double mean = sum / used;
        double ss = 0.0;
        for (int k = 0; k < K; ++k) {
            const double v = result.fold_loss(k, static_cast<Index>(l));
            if (!std::isnan(v))
                ss += (v - mean) * (v - mean);
        }
        result.mean[l] = mean;
        result.se[l] = used > 1.0 ? std::sqrt(ss / (used - 1.0) / used) : 0.0;
    }

    // path is descending, so a strict comparison keeps the larger λ on ties
    std::size_t best = 0;
    for (std::size_t l = 1; l < L; ++l)
        if (result.mean[l] < result.mean[best])
            best = l;
    result.selected_index = best;
    result.selected_lambda = path.values[best];
    return result;
}

} // namespace sparsepsi
