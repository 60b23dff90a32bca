#include <sparsepsi/bench.hpp>

#include <sparsepsi/rng.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace sparsepsi {

void DesignSpec::validate() const
{
    if (n < 2)
        throw std::invalid_argument("design: n must be >= 2");
    if (p < 1)
        throw std::invalid_argument("design: p must be >= 1");
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("design: rho must lie in [0, 1)");
}

PairSet ModelSpec::truth() const
{
    switch (model_id) {
    case 1: return {};
    case 2: return {{0, 1}, {3, 4}};
    case 3: return {{0, 1}, {1, 2}};
    case 4: return {{0, 0}, {4, 7}};
    case 5: return {{0, 0}, {4, 7}, {8, 8}};
    case 6:
    case 7:
    case 8: return {{0, 4}};
    case 9: {
        PairSet out;
        for (Index j = 0; j < 9; ++j)
            out.push_back({j, j + 1});
        return out;
    }
    default: throw std::invalid_argument("model id must be in 1..9");
    }
}

Index ModelSpec::min_p() const
{
    switch (model_id) {
    case 3: return 3;
    case 4: return 8;
    case 5: return 9;
    case 9: return 10;
    case 1:
    case 2:
    case 6:
    case 7:
    case 8: return 5;
    default: throw std::invalid_argument("model id must be in 1..9");
    }
}

void ModelSpec::validate() const
{
    if (model_id < 1 || model_id > 9)
        throw std::invalid_argument("model id must be in 1..9");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
        throw std::invalid_argument("noise standard deviation must be finite and >= 0");
}

Matrix toeplitz_sigma(Index p, double rho)
{
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("toeplitz: rho must lie in [0, 1)");
    Matrix sigma(p, p);
    for (Index j = 0; j < p; ++j)
        for (Index k = 0; k < p; ++k)
            sigma(j, k) = j == k ? 1.0 : std::pow(rho, static_cast<double>(std::abs(j - k)));
    return sigma;
}

Matrix sample_design(const DesignSpec& spec)
{
    spec.validate();
    Engine engine(spec.seed);
    Matrix z = standard_normal(spec.n, spec.p, engine);
    if (spec.rho == 0.0)
        return z;
    Eigen::LLT<Matrix> llt(toeplitz_sigma(spec.p, spec.rho));
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("design: Cholesky factorization of Sigma failed");
    return z * llt.matrixU(); // rows zᵢᵀU = (Lzᵢ)ᵀ
}

Vector gen_response(const Matrix& X, const ModelSpec& model, std::uint64_t seed)
{
    model.validate();
    if (X.cols() < model.min_p())
        throw std::invalid_argument("model " + std::to_string(model.model_id) + " requires p ≥ " +
                                    std::to_string(model.min_p()));
    Engine engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index n = X.rows();
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        // 1-based names to mirror the model formulas
        auto x = [&](Index j) { return X(i, j - 1); };
        const double eps = model.noise_sd * normal(engine);
        double v = 0.0;
        switch (model.model_id) {
        case 1: v = x(1) + x(5) + eps; break;
        case 2: v = 0.6 * x(1) * x(2) + 0.8 * x(4) * x(5) + eps; break;
        case 3: v = 0.6 * x(1) * x(2) + 0.8 * x(2) * x(3) + eps; break;
        case 4: v = 0.5 * x(1) * x(1) + 0.9 * x(5) * x(8) + eps; break;
        case 5: v = x(1) * x(1) + x(5) * x(8) + x(9) * x(9) + eps; break;
        case 6: v = x(1) + x(5) + x(1) * x(5) + eps; break;
        case 7: v = 0.1 * x(1) + 0.1 * x(5) + x(1) * x(5) + eps; break;
        case 8: v = x(1) * x(5) + x(2) * x(3) * eps; break;
        case 9:
            for (Index j = 1; j <= 9; ++j)
                v += x(j) * x(j + 1);
            v += eps;
            break;
        }
        y(i) = v;
    }
    return y;
}

std::size_t negative_pair_count(std::size_t truth_size, Index d)
{
    const auto dd = static_cast<std::size_t>(d);
    return dd * (dd - 1) / 2 + dd - truth_size;
}

Rates tpr_fpr(const PairSet& truth, const PairSet& selected, Index d)
{
    auto check = [d](const IndexPair& q) {
        if (q.i > q.j)
            throw std::invalid_argument("tpr_fpr: pair (" + std::to_string(q.i) + ", " +
                                        std::to_string(q.j) + ") is not normalized");
        if (q.i < 0 || q.j >= d)
            throw std::invalid_argument("tpr_fpr: pair index outside [0, d)");
    };
    std::set<IndexPair> t, s;
    for (const auto& q : truth) {
        check(q);
        t.insert(q);
    }
    for (const auto& q : selected) {
        check(q);
        s.insert(q);
    }
    std::size_t hits = 0;
    for (const auto& q : s)
        hits += t.count(q);
    const std::size_t false_pos = s.size() - hits;

    Rates r;
    if (!t.empty())
        r.tpr = static_cast<double>(hits) / static_cast<double>(t.size());
    r.fpr = static_cast<double>(false_pos) / static_cast<double>(negative_pair_count(t.size(), d));
    return r;
}

ReplicationSeeds replication_seeds(std::uint64_t seed)
{
    return {derive_seed(seed, 0), derive_seed(seed, 1), derive_seed(seed, 2)};
}

DataSet simulate(Index n, Index p, double rho, const ModelSpec& model, std::uint64_t seed)
{
    model.validate();
    if (p < model.min_p())
        throw std::invalid_argument("model " + std::to_string(model.model_id) + " requires p ≥ " +
                                    std::to_string(model.min_p()));
    const auto seeds = replication_seeds(seed);
    DataSet data;
    data.X = sample_design({n, p, rho, seeds.design});
    data.y = gen_response(data.X, model, seeds.noise);
    for (Index j = 1; j <= p; ++j)
        data.names.push_back("x" + std::to_string(j));
    return data;
}

namespace {

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

MetricsReport run_experiment(const DesignSpec& design, const ModelSpec& model, int reps,
                             const FitOptions& method, int jobs, const ReplicationObserver& observer)
{
    design.validate();
    model.validate();
    if (reps < 1)
        throw std::invalid_argument("experiment: reps must be >= 1");
    if (design.p < model.min_p())
        throw std::invalid_argument("model " + std::to_string(model.model_id) + " requires p ≥ " +
                                    std::to_string(model.min_p()));

    const PairSet truth = model.truth();
    const IndexPair noise_pair{1, 2};

    MetricsReport report;
    report.records.resize(static_cast<std::size_t>(reps));
    std::mutex observer_mutex;
    std::atomic<int> next_rep{0};

    auto worker = [&]() {
        for (int r = next_rep++; r < reps; r = next_rep++) {
            ReplicationRecord& rec = report.records[static_cast<std::size_t>(r)];
            rec.rep = r;
            rec.seed = design.seed + static_cast<std::uint64_t>(r);
            try {
                const DataSet data = simulate(design.n, design.p, design.rho, model, rec.seed);
                FitOptions opts = method;
                opts.cv.seed = replication_seeds(rec.seed).folds;

                const auto start = std::chrono::steady_clock::now();
                const FitResult fit = fit_pipeline(data, opts);
                rec.time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                               .count();

                rec.selected = fit.estimate.support;
                const Rates rates = tpr_fpr(truth, rec.selected, design.p);
                rec.tpr = rates.tpr;
                rec.fpr = rates.fpr;
                rec.lambda = fit.estimate.lambda;
                rec.support_size = rec.selected.size();
                rec.converged = fit.report.converged;
                rec.iterations = fit.report.state.iter;
                if (model.model_id == 8)
                    rec.hit_noise_pair = std::find(rec.selected.begin(), rec.selected.end(),
                                                   noise_pair) != rec.selected.end();
                rec.ok = true;
                if (observer) {
                    std::lock_guard<std::mutex> lock(observer_mutex);
                    observer(r, data, fit);
                }
            } catch (const std::exception& e) {
                rec.ok = false;
                rec.error = e.what();
            }
        }
    };

    const int threads = std::max(1, std::min(jobs, reps));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    std::vector<double> tprs, fprs, times;
    for (const auto& rec : report.records) {
        if (!rec.ok) {
            ++report.failures;
            continue;
        }
        if (rec.tpr)
            tprs.push_back(*rec.tpr);
        fprs.push_back(rec.fpr);
        times.push_back(rec.time);
    }
    if (!tprs.empty()) {
        report.tpr_mean = mean_of(tprs);
        report.tpr_se = sd_of(tprs) / std::sqrt(static_cast<double>(tprs.size()));
    }
    report.fpr_mean = mean_of(fprs);
    report.fpr_se = fprs.empty() ? 0.0 : sd_of(fprs) / std::sqrt(static_cast<double>(fprs.size()));
    report.time_mean = mean_of(times);
    report.time_sd = sd_of(times);
    return report;
}

} // namespace sparsepsi
