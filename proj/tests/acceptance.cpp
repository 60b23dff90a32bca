// Acceptance run: one PASS/FAIL line per criterion. Thresholds are fixed
// below. Usage: acceptance [--reps N] [--only K]...

#include <sparsepsi/bench.hpp>
#include <sparsepsi/detect.hpp>
#include <sparsepsi/oracle.hpp>
#include <sparsepsi/rng.hpp>
#include <sparsepsi/solver.hpp>
#include <sparsepsi/tuning.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

using namespace sparsepsi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- tolerances -----------------------------------------------------------

constexpr double kObjectiveRel = 1e-6;
constexpr double kBridge = 1e-8;
constexpr double kCriterion1Seconds = 60.0;
constexpr double kTprModel2 = 0.90;
constexpr double kFprModel2 = 0.01;
constexpr double kFprModel1 = 0.005;
constexpr double kTprModel7 = 0.90;
constexpr double kPopulationDeviation = 0.05;
constexpr double kInverseTol = 1e-10;
constexpr double kScaleTol = 1e-8;
constexpr double kKronTol = 1e-10;
constexpr double kCriterion7Seconds = 120.0;
constexpr double kTprModel3 = 0.95;
constexpr double kTprModel5 = 0.80;
constexpr double kTprModel9 = 0.95;
constexpr double kCriterion9Seconds = 300.0;
constexpr int kKktSamplesPerModel = 10;

// ---- shared state for criterion 2 ------------------------------------------

struct KktTally
{
    std::mutex mu;
    int checked = 0;
    int failed = 0;
    int skipped_unconverged = 0;
    std::map<int, int> per_model;
    double worst_ratio = 0.0; // max violation / tolerance
    std::vector<std::string> notes;

    void record(const std::string& label, const Matrix& phi, const MomentPair& m, double lambda,
                double tol, bool converged, int model = 0)
    {
        std::lock_guard<std::mutex> lock(mu);
        if (model)
            ++per_model[model];
        if (!converged) {
            ++skipped_unconverged;
            return;
        }
        const double eps = kkt_tolerance(m, tol);
        const KktCertificate c = kkt_check(phi, m, lambda, eps);
        ++checked;
        worst_ratio = std::max(worst_ratio, std::max(c.max_violation_on_support,
                                                     c.max_violation_off_support) / eps);
        if (!c.passed) {
            ++failed;
            notes.push_back(label);
        }
    }
};

KktTally g_kkt;

ReplicationObserver kkt_observer(int model)
{
    return [model](int rep, const DataSet&, const FitResult& fit) {
        if (rep >= kKktSamplesPerModel)
            return;
        g_kkt.record("model " + std::to_string(model) + " rep " + std::to_string(rep),
                     fit.report.state.phi, fit.moments, fit.estimate.lambda, FitOptions{}.solver.tol,
                     fit.report.converged, model);
    };
}

int jobs()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---- criterion 1 ---------------------------------------------------------------

struct Instance
{
    MomentPair m;
    double lambda;
};

std::vector<Instance> oracle_instances()
{
    Engine engine(20240601);
    std::vector<Instance> out;
    for (int k = 0; k < 20; ++k) {
        const Index p = 2 + k % 9;
        const Matrix B = standard_normal(3 * p, p, engine);
        Instance in;
        in.m.p = p;
        in.m.n = 3 * p;
        in.m.S = B.transpose() * B / static_cast<double>(3 * p);
        in.m.S = 0.5 * (in.m.S + in.m.S.transpose()).eval();
        const Matrix A = standard_normal(p, p, engine);
        in.m.Q = 0.5 * (A + A.transpose());
        // λ from just below max|Q| down three decades
        const double top = in.m.Q.cwiseAbs().maxCoeff();
        in.lambda = top * std::pow(10.0, -0.05 - 2.95 * k / 19.0);
        out.push_back(in);
    }
    return out;
}

Matrix bridged(const Matrix& m)
{
    return m.unaryExpr([](double v) { return std::abs(v) < kBridge ? 0.0 : v; });
}

Outcome criterion1()
{
    const auto t0 = Clock::now();
    double worst_rel = 0.0;
    int support_mismatch = 0, unconverged = 0;
    for (const Instance& in : oracle_instances()) {
        SolverConfig cfg;
        cfg.lambda = in.lambda;
        cfg.tol = 1e-10;
        cfg.max_iter = 1000000;
        const SolveReport r = solve(in.m, cfg);
        unconverged += !r.converged;
        g_kkt.record("oracle instance p=" + std::to_string(in.m.p), r.state.phi, in.m, in.lambda, cfg.tol,
                     r.converged);

        SolverConfig loose = cfg;
        loose.tol = 1e-3;
        loose.max_iter = 10000;
        const SolveReport rl = solve(in.m, loose);
        g_kkt.record("oracle instance p=" + std::to_string(in.m.p) + " default tol", rl.state.phi, in.m,
                     in.lambda, loose.tol, rl.converged);

        const Matrix ref = reference_solve(in.m, in.lambda);
        const double fa = penalized_objective(r.state.phi, in.m, in.lambda);
        const double fr = penalized_objective(ref, in.m, in.lambda);
        worst_rel = std::max(worst_rel, std::abs(fa - fr) / std::max(std::abs(fr), 1e-300));
        const Matrix a = bridged(r.state.phi);
        const Matrix b = bridged(ref);
        support_mismatch += !((a.array() != 0.0) == (b.array() != 0.0)).all();
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = worst_rel <= kObjectiveRel && support_mismatch == 0 && unconverged == 0 &&
             t < kCriterion1Seconds;
    o.detail = "max relative objective gap " + fmt("%.2e", worst_rel) + " (<= 1e-6), support mismatches " +
               std::to_string(support_mismatch) + " (0), unconverged " + std::to_string(unconverged) +
               ", " + fmt("%.1f", t) + " s (< 60 s)";
    return o;
}

// ---- benchmark criteria -------------------------------------------------------------

struct Cell
{
    int model;
    double rho;
    double sigma;
    std::uint64_t seed;
};

MetricsReport run_cell(const Cell& c, int reps)
{
    FitOptions opts; // CV tuning, default solver and grid
    return run_experiment(DesignSpec{100, 100, c.rho, c.seed}, ModelSpec{c.model, c.sigma}, reps, opts,
                          jobs(), kkt_observer(c.model));
}

std::string describe(const Cell& c, const MetricsReport& m)
{
    return "model " + std::to_string(c.model) + " (rho=" + fmt("%g", c.rho) + ", sigma=" + fmt("%g", c.sigma) +
           "): TPR " + (m.tpr_mean ? fmt("%.3f", *m.tpr_mean) : std::string("NA")) + ", FPR " +
           fmt("%.5f", m.fpr_mean) + ", " + fmt("%.2f", m.time_mean) + " s/fit, failures " +
           std::to_string(m.failures) + ", reps " + std::to_string(m.records.size());
}

Outcome criterion3(int reps)
{
    const Cell c{2, 0.0, 0.1, 3000};
    const MetricsReport m = run_cell(c, reps);
    Outcome o;
    o.pass = m.tpr_mean && *m.tpr_mean >= kTprModel2 && m.fpr_mean <= kFprModel2;
    o.detail = describe(c, m) + " (need TPR >= 0.90, FPR <= 0.01)";
    return o;
}

Outcome criterion4(int reps)
{
    const Cell c{1, 0.0, 0.1, 4000};
    const MetricsReport m = run_cell(c, reps);
    Outcome o;
    o.pass = !m.tpr_mean && m.fpr_mean <= kFprModel1;
    o.detail = describe(c, m) + " (need FPR <= 0.005, TPR NA)";
    return o;
}

Outcome criterion5(int reps)
{
    const Cell c{7, 0.0, 1.0, 5000};
    const MetricsReport m = run_cell(c, reps);
    Outcome o;
    o.pass = m.tpr_mean && *m.tpr_mean >= kTprModel7;
    o.detail = describe(c, m) + " (need TPR >= 0.90)";
    return o;
}

Outcome criterion8(int reps)
{
    const std::vector<std::pair<Cell, double>> cells{
        {{3, 0.4, 0.1, 8000}, kTprModel3}, {{5, 0.0, 1.0, 8100}, kTprModel5}, {{9, 0.0, 1.0, 8200}, kTprModel9}};
    Outcome o;
    o.pass = true;
    for (const auto& [c, bar] : cells) {
        const MetricsReport m = run_cell(c, reps);
        const bool ok = m.tpr_mean && *m.tpr_mean >= bar;
        o.pass = o.pass && ok;
        if (!o.detail.empty())
            o.detail += "; ";
        o.detail += describe(c, m) + " (need TPR >= " + fmt("%.2f", bar) + (ok ? ")" : ", missed)");
    }
    return o;
}

// Models not exercised by the criteria above still contribute sampled fits.
void kkt_extra_models()
{
    for (const Cell& c : {Cell{4, 0.0, 1.0, 2400}, Cell{6, 0.0, 1.0, 2600}, Cell{8, 0.0, 1.0, 2800}}) {
        const MetricsReport m = run_cell(c, kKktSamplesPerModel);
        std::printf("  (criterion 2 sample) %s\n", describe(c, m).c_str());
        std::fflush(stdout);
    }
}

Outcome criterion2()
{
    Outcome o;
    std::string models;
    for (const auto& [model, n] : g_kkt.per_model)
        models += (models.empty() ? "" : ",") + std::to_string(model) + ":" + std::to_string(n);
    o.pass = g_kkt.failed == 0 && g_kkt.checked > 0;
    o.detail = std::to_string(g_kkt.checked) + " converged solves certified, " + std::to_string(g_kkt.failed) +
               " failed, worst violation/tolerance " + fmt("%.3f", g_kkt.worst_ratio) + ", " +
               std::to_string(g_kkt.skipped_unconverged) + " unconverged skipped; benchmark fits per model {" +
               models + "}";
    for (std::size_t k = 0; k < std::min<std::size_t>(g_kkt.notes.size(), 5); ++k)
        o.detail += "; failed: " + g_kkt.notes[k];
    return o;
}

// ---- criterion 6 -------------------------------------------------------------

Outcome criterion6()
{
    const double dev = population_psi_check(0.5, 1000000, 606);
    double inv_err = 0.0;
    for (double rho : {0.0, 0.25, 0.5, 0.75, 0.9})
        inv_err = std::max(inv_err, (worked_example_sigma_inverse(rho) - toeplitz_sigma(3, rho).inverse())
                                        .cwiseAbs()
                                        .maxCoeff());
    Outcome o;
    o.pass = dev < kPopulationDeviation && inv_err <= kInverseTol;
    o.detail = "population deviation " + fmt("%.4f", dev) + " (< 0.05), inverse formula error " +
               fmt("%.2e", inv_err) + " (<= 1e-10)";
    return o;
}

// ---- criterion 7 ----------------------------------------------------------

Outcome criterion7()
{
    const auto t0 = Clock::now();
    Engine engine(77);
    std::vector<std::string> failures;
    auto require = [&](bool ok, const std::string& what) {
        if (!ok)
            failures.push_back(what);
    };

    // shrinkage: +0.0 bit pattern or strictly nonzero, at every entry
    {
        const Matrix A = standard_normal(60, 60, engine);
        bool ok = true;
        for (double t : {0.0, 0.3, 1.0}) {
            const Matrix out = shrinkage(A, t);
            for (Index k = 0; k < out.size(); ++k) {
                const double v = out.data()[k];
                const double zero = 0.0;
                if (std::abs(A.data()[k]) <= t)
                    ok = ok && std::memcmp(&v, &zero, sizeof v) == 0;
                else
                    ok = ok && std::abs(v) >= std::numeric_limits<double>::min();
            }
        }
        require(ok, "shrinkage exact zeros");
    }

    auto make_moments = [&](Index p) {
        const Matrix B = standard_normal(3 * p, p, engine);
        MomentPair m;
        m.p = p;
        m.n = 3 * p;
        m.S = B.transpose() * B / static_cast<double>(3 * p);
        m.S = 0.5 * (m.S + m.S.transpose()).eval();
        const Matrix A = standard_normal(p, p, engine);
        m.Q = 0.5 * (A + A.transpose());
        return m;
    };

    // scale consistency
    {
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const MomentPair m = make_moments(3 + k);
            SolverConfig cfg;
            cfg.lambda = 0.2 * m.Q.cwiseAbs().maxCoeff();
            cfg.tol = 1e-10;
            cfg.max_iter = 200000;
            const Matrix base = solve(m, cfg).state.phi;
            for (double c : {0.1, 4.0}) {
                MomentPair sm = m;
                sm.Q *= c;
                SolverConfig sc = cfg;
                sc.lambda *= c;
                sc.tol *= c;
                const Matrix scaled = solve(sm, sc).state.phi;
                worst = std::max(worst, (scaled - c * base).cwiseAbs().maxCoeff() /
                                            (c * base.cwiseAbs().maxCoeff()));
            }
        }
        require(worst <= kScaleTol, "scale consistency " + fmt("%.2e", worst));
    }

    // vec(SΦS) = (S⊗S) vec(Φ)
    {
        double worst = 0.0;
        for (Index p : {2, 5, 9}) {
            const MomentPair m = make_moments(p);
            const Matrix phi = standard_normal(p, p, engine);
            const Matrix lhs = m.S * phi * m.S;
            const Vector rhs = kronecker(m.S, m.S) * Eigen::Map<const Vector>(phi.data(), p * p);
            const Vector l = Eigen::Map<const Vector>(lhs.data(), p * p);
            worst = std::max(worst, (l - rhs).cwiseAbs().maxCoeff() / l.cwiseAbs().maxCoeff());
        }
        require(worst <= kKronTol, "vec/Kronecker identity " + fmt("%.2e", worst));
    }

    // determinism
    {
        const MomentPair m = make_moments(12);
        SolverConfig cfg;
        cfg.lambda = 0.1 * m.Q.cwiseAbs().maxCoeff();
        const SolveReport a = solve(m, cfg);
        const SolveReport b = solve(m, cfg);
        require(a.history.size() == b.history.size() &&
                    std::memcmp(a.history.data(), b.history.data(), a.history.size() * sizeof(ResidualRecord)) == 0,
                "bitwise residual histories");
    }

    // fold exhaustiveness
    {
        bool ok = true;
        for (int trial = 0; trial < 100; ++trial) {
            const Index n = 10 + static_cast<Index>(engine() % 300);
            const int K = 2 + static_cast<int>(engine() % 12);
            const auto folds = kfold_split(n, K, engine());
            std::vector<int> seen(static_cast<std::size_t>(n), 0);
            for (const Fold& f : folds)
                for (Index i : f.validation)
                    ++seen[static_cast<std::size_t>(i)];
            ok = ok && std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
        }
        require(ok, "fold exhaustiveness");
    }

    // TPR/FPR worked values
    {
        const Rates r = tpr_fpr({{0, 1}, {3, 4}}, {{0, 1}, {1, 2}}, 100);
        const Rates null = tpr_fpr({}, {{0, 1}}, 10);
        require(r.tpr && *r.tpr == 0.5 && r.fpr == 1.0 / 5048.0, "TPR/FPR 1/5048");
        require(!null.tpr && null.fpr == 1.0 / 55.0, "TPR/FPR null 1/55");
    }

    const double t = seconds_since(t0);
    require(t < kCriterion7Seconds, "runtime");
    Outcome o;
    o.pass = failures.empty();
    o.detail = "6 property groups in " + fmt("%.2f", t) + " s (< 120 s)";
    for (const auto& f : failures)
        o.detail += "; failed: " + f;
    return o;
}

// ---- criterion 9 ------------------------------------------------------------

Outcome criterion9()
{
    const DataSet d = simulate(250, 1000, 0.0, ModelSpec{2, 0.1}, 9000);
    FitOptions opts;
    opts.cv.seed = replication_seeds(9000).folds;
    opts.screen_keep = 100;
    const auto t0 = Clock::now();
    const FitResult fit = fit_pipeline(d, opts);
    const double t = seconds_since(t0);
    const double eps = kkt_tolerance(fit.moments, FitOptions{}.solver.tol);
    const KktCertificate c = kkt_check(fit.report.state.phi, fit.moments, fit.estimate.lambda, eps);
    const Rates r = tpr_fpr(ModelSpec{2, 0.1}.truth(), fit.estimate.support, 1000);
    Outcome o;
    o.pass = t < kCriterion9Seconds && fit.report.converged && c.passed;
    o.detail = "p=1000, n=250, screened to 100: " + fmt("%.1f", t) + " s (< 300 s), converged " +
               (fit.report.converged ? "yes" : "no") + ", KKT " + (c.passed ? "passed" : "failed") +
               " (worst " + fmt("%.2e", std::max(c.max_violation_on_support, c.max_violation_off_support)) +
               " vs " + fmt("%.2e", eps) + "); informational TPR " + fmt("%.2f", r.tpr.value_or(0.0)) +
               ", FPR " + fmt("%.5f", r.fpr);
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    int reps = 50;
    std::set<int> only;
    for (int k = 1; k < argc; ++k) {
        if (std::strcmp(argv[k], "--reps") == 0 && k + 1 < argc)
            reps = std::max(1, std::atoi(argv[++k]));
        else if (std::strcmp(argv[k], "--only") == 0 && k + 1 < argc)
            only.insert(std::atoi(argv[++k]));
        else {
            std::fprintf(stderr, "usage: acceptance [--reps N] [--only K]...\n");
            return 1;
        }
    }
    auto wanted = [&](int k) { return only.empty() || only.count(k); };

    std::map<int, Outcome> results;
    auto run = [&](int k, const std::function<Outcome()>& f) {
        if (!wanted(k))
            return;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        results[k] = o;
        std::printf("criterion %d: %s  %s  [%.0f s]\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    };

    run(7, criterion7);
    run(6, criterion6);
    run(1, criterion1);
    run(9, criterion9);
    run(3, [&] { return criterion3(reps); });
    run(4, [&] { return criterion4(reps); });
    run(5, [&] { return criterion5(reps); });
    run(8, [&] { return criterion8(reps); });
    if (wanted(2)) {
        kkt_extra_models();
        run(2, criterion2);
    }

    std::printf("\nsummary\n");
    int failed = 0;
    for (const auto& [k, o] : results) {
        std::printf("criterion %d: %s\n", k, o.pass ? "PASS" : "FAIL");
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
