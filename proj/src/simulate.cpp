#include "wick/simulate.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "wick/process.hpp"

namespace wick {

FbmSampler::FbmSampler(double H, std::vector<double> times)
    : H_(H), times_(std::move(times)) {
    if (!(H > 0.0 && H < 1.0)) throw Error("fBm needs H in (0,1)");
    if (times_.empty() || times_.size() > 4096)
        throw Error("fBm grid must have between 1 and 4096 points");
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (times_[k] <= 0.0) throw Error("fBm grid times must be positive");
        if (k > 0 && times_[k] <= times_[k - 1])
            throw Error("fBm grid must be strictly increasing");
    }
    const int n = static_cast<int>(times_.size());
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double u = times_[i], v = times_[j];
            cov(i, j) = 0.5 * (std::pow(u, 2 * H) + std::pow(v, 2 * H) -
                               std::pow(std::abs(u - v), 2 * H));
        }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        cov.diagonal().array() += 1e-12 * cov.trace() / n; // jitter once
        llt.compute(cov);
        if (llt.info() != Eigen::Success)
            throw Error("fBm covariance matrix is not numerically positive definite");
    }
    chol_ = llt.matrixL();
    full_times_.push_back(0.0);
    full_times_.insert(full_times_.end(), times_.begin(), times_.end());
}

SamplePath FbmSampler::sample(std::uint64_t seed, std::uint64_t path_index) const {
    const int n = static_cast<int>(times_.size());
    CounterRng rng(seed, path_index);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.next_normal();
    Eigen::VectorXd x = chol_ * z;
    SamplePath path;
    path.times = full_times_;
    path.values.resize(times_.size() + 1, std::vector<double>(1, 0.0));
    for (int i = 0; i < n; ++i) path.values[i + 1][0] = x(i);
    return path;
}

std::vector<double> uniform_grid(double T, int intervals) {
    std::vector<double> t(intervals);
    for (int k = 1; k <= intervals; ++k) t[k - 1] = T * k / intervals;
    return t;
}

Chaos2PathSampler::Chaos2PathSampler(std::vector<double> times,
                                     std::vector<Chaos2Kernel> kernels, bool prepend_origin)
    : times_(std::move(times)), prepend_origin_(prepend_origin) {
    if (times_.size() != kernels.size()) throw Error("one kernel per time required");
    if (kernels.empty()) throw Error("at least one kernel required");
    for (std::size_t i = 1; i < kernels.size(); ++i)
        kernels[0].require_same_grid(kernels[i]);
    grid_size_ = kernels[0].size();
    for (const auto& k : kernels) {
        scaled_.push_back(k.scaled());
        traces_.push_back(k.scaled().trace());
    }
}

SamplePath Chaos2PathSampler::sample(std::uint64_t seed, std::uint64_t path_index) const {
    CounterRng rng(seed, path_index);
    Eigen::VectorXd z(grid_size_);
    for (int i = 0; i < grid_size_; ++i) z(i) = rng.next_normal();
    SamplePath path;
    if (prepend_origin_) {
        path.times.push_back(0.0);
        path.values.push_back({0.0});
    }
    for (std::size_t k = 0; k < times_.size(); ++k) {
        path.times.push_back(times_[k]);
        path.values.push_back({z.dot(scaled_[k] * z) - traces_[k]});
    }
    return path;
}

std::string ExperimentReport::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["estimate"] = estimate;
    j["stderr"] = stderr_;
    j["n_paths"] = n_paths;
    j["seed"] = seed;
    j["config"] = config_echo;
    j["extras"] = extras;
    return j.dump(2);
}

namespace {

class Experiment {
public:
    virtual ~Experiment() = default;
    virtual std::size_t n_outputs() const = 0;
    virtual void eval(std::uint64_t seed, std::uint64_t path_index,
                      std::vector<double>& out) const = 0;
    virtual void finalize(const std::vector<double>& sums, std::uint64_t n,
                          ExperimentReport& rep) const = 0;
};

void mean_and_stderr(double s1, double s2, std::uint64_t n, double& mean, double& se) {
    mean = s1 / n;
    double var = (s2 - n * mean * mean) / (n - 1.0);
    se = std::sqrt(std::max(0.0, var) / n);
}

// Mean of the Young integral int_0^1 X dX for fBm. The integrand x is an
// exact one-form, so in the q < 2 variation regime the Young integral
// telescopes to (X_1^2 - X_0^2)/2 pathwise; that value is the estimator.
// The raw left-point sum is reported alongside together with its exact
// discrete expectation, which carries an O(mesh^{2H-1}) gap to 1/2.
class YoungMeanExperiment final : public Experiment {
public:
    YoungMeanExperiment(double H, int grid) : sampler_(H, uniform_grid(1.0, grid)) {
        FbmProcessModel model(H);
        const auto& t = sampler_.grid_with_origin();
        left_point_mean_ = 0.0;
        for (std::size_t k = 0; k + 1 < t.size(); ++k)
            left_point_mean_ +=
                model.covariance(t[k], t[k + 1]) - model.covariance(t[k], t[k]);
    }

    std::size_t n_outputs() const override { return 4; }

    void eval(std::uint64_t seed, std::uint64_t path_index,
              std::vector<double>& out) const override {
        SamplePath p = sampler_.sample(seed, path_index);
        const std::size_t last = p.times.size() - 1;
        double exact = 0.5 * (p.values[last][0] * p.values[last][0] -
                              p.values[0][0] * p.values[0][0]);
        double left = 0.0;
        for (std::size_t k = 0; k + 1 < p.times.size(); ++k)
            left += p.values[k][0] * (p.values[k + 1][0] - p.values[k][0]);
        out = {exact, exact * exact, left, left * left};
    }

    void finalize(const std::vector<double>& sums, std::uint64_t n,
                  ExperimentReport& rep) const override {
        mean_and_stderr(sums[0], sums[1], n, rep.estimate, rep.stderr_);
        double lmean, lse;
        mean_and_stderr(sums[2], sums[3], n, lmean, lse);
        rep.extras["target"] = 0.5;
        rep.extras["left_point"] = {{"estimate", lmean},
                                    {"stderr", lse},
                                    {"discrete_mean", left_point_mean_}};
    }

private:
    FbmSampler sampler_;
    double left_point_mean_ = 0.0;
};

class ZeroMeanWickExperiment final : public Experiment {
public:
    ZeroMeanWickExperiment(double H, int grid, int degree)
        : sampler_(H, uniform_grid(1.0, grid)), model_(H),
          integrator_(PolynomialOneForm::scalar(scalar_monomial(degree)), model_,
                      sampler_.grid_with_origin()) {}

    std::size_t n_outputs() const override { return 5; }

    void eval(std::uint64_t seed, std::uint64_t path_index,
              std::vector<double>& out) const override {
        SamplePath p = sampler_.sample(seed, path_index);
        WickSumBreakdown b = integrator_.evaluate(p);
        out = {b.wick, b.wick * b.wick, std::abs(b.consistency_residual), b.young,
               b.correction};
    }

    void finalize(const std::vector<double>& sums, std::uint64_t n,
                  ExperimentReport& rep) const override {
        mean_and_stderr(sums[0], sums[1], n, rep.estimate, rep.stderr_);
        rep.extras["target"] = 0.0;
        rep.extras["consistency_abs_sum"] = sums[2];
        rep.extras["young_mean"] = sums[3] / n;
        rep.extras["correction_mean"] = sums[4] / n;
    }

private:
    FbmSampler sampler_;
    FbmProcessModel model_;
    WickIntegrator integrator_;
};

// Residual of int_0^1 X^{<>n} <> dX = X^{<>(n+1)}_{0,1} / (n+1) on nested
// dyadic grids; the per-level Appell coefficients and cumulant increments
// are path-independent and precomputed.
class ScalarIdentityExperiment final : public Experiment {
public:
    ScalarIdentityExperiment(double H, int grid, int n, int refinements)
        : sampler_(H, uniform_grid(1.0, grid)), n_(n) {
        FbmProcessModel model(H);
        const auto& full = sampler_.grid_with_origin();
        for (int level = refinements; level >= 0; --level) {
            int stride = 1 << level;
            if (static_cast<std::size_t>(stride) >= full.size())
                throw UsageError("refinement ladder is deeper than the grid");
            Level lv;
            lv.stride = stride;
            for (std::size_t k = 0; k + stride < full.size(); k += stride) {
                Interval iv;
                iv.index_u = k;
                iv.index_v = std::min(k + stride, full.size() - 1);
                double u = full[iv.index_u], v = full[iv.index_v];
                lv.mesh = std::max(lv.mesh, v - u);
                std::vector<double> kappa(n + 1, 0.0);
                if (n >= 2) kappa[2] = std::pow(u, 2 * H);
                iv.appell = univariate_appell_coefficients(n, kappa);
                iv.dkappa.assign(n + 1, 0.0);
                if (n >= 1) iv.dkappa[1] = model.covariance(u, v) - model.covariance(u, u);
                lv.intervals.push_back(std::move(iv));
            }
            levels_.push_back(std::move(lv));
        }
        // w_{n+1} coefficient tables at the endpoints
        std::vector<double> kappa_t(n + 2, 0.0);
        if (n + 1 >= 2) kappa_t[2] = 1.0; // kappa_2(1) = 1 for fBm on [0,1]
        rhs_coeff_t_ = univariate_appell_coefficients(n + 1, kappa_t);
        rhs_coeff_s_ = univariate_appell_coefficients(n + 1, std::vector<double>(n + 2, 0.0));
    }

    std::size_t n_outputs() const override { return 2 * levels_.size(); }

    void eval(std::uint64_t seed, std::uint64_t path_index,
              std::vector<double>& out) const override {
        SamplePath p = sampler_.sample(seed, path_index);
        const std::size_t last = p.times.size() - 1;
        double rhs = 0.0;
        for (int m = 0; m <= n_ + 1; ++m)
            rhs += rhs_coeff_t_[m] * std::pow(p.values[last][0], m) -
                   rhs_coeff_s_[m] * std::pow(p.values[0][0], m);
        rhs /= (n_ + 1);
        out.assign(2 * levels_.size(), 0.0);
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            double lhs = 0.0;
            for (const auto& iv : levels_[l].intervals) {
                double xu = p.values[iv.index_u][0];
                double incr = p.values[iv.index_v][0] - xu;
                for (int m = 0; m <= n_; ++m) {
                    if (iv.appell[m] == 0.0) continue;
                    double corr = 0.0;
                    for (int j = 1; j <= m; ++j)
                        corr += static_cast<double>(binomial(m, j)) *
                                std::pow(xu, m - j) * iv.dkappa[j];
                    lhs += iv.appell[m] * (std::pow(xu, m) * incr - corr);
                }
            }
            double r = lhs - rhs;
            out[2 * l] = r;
            out[2 * l + 1] = r * r;
        }
    }

    void finalize(const std::vector<double>& sums, std::uint64_t n,
                  ExperimentReport& rep) const override {
        nlohmann::json table = nlohmann::json::array();
        bool monotone = true;
        double prev = 0.0;
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            double rms = std::sqrt(sums[2 * l + 1] / n);
            if (l > 0 && rms >= prev) monotone = false;
            prev = rms;
            table.push_back({{"mesh", levels_[l].mesh}, {"rms_residual", rms}});
        }
        std::size_t fin = levels_.size() - 1;
        mean_and_stderr(sums[2 * fin], sums[2 * fin + 1], n, rep.estimate, rep.stderr_);
        rep.estimate = std::sqrt(sums[2 * fin + 1] / n); // RMS at the finest mesh
        rep.extras["mesh_table"] = table;
        rep.extras["monotone_decreasing"] = monotone;
    }

private:
    struct Interval {
        std::size_t index_u = 0, index_v = 0;
        std::vector<double> appell; // coefficients of w_n at the left endpoint
        std::vector<double> dkappa; // kappa[(X_u)^j, X_{u,v}] by j
    };
    struct Level {
        int stride = 1;
        double mesh = 0.0;
        std::vector<Interval> intervals;
    };
    FbmSampler sampler_;
    int n_;
    std::vector<Level> levels_;
    std::vector<double> rhs_coeff_t_, rhs_coeff_s_;
};

// E[e^X X] / E[e^X] for X = eps (Z^2 - 1), ratio estimator with a
// delta-method standard error; the closed-form target is
// 2 eps^2 / (1 - 2 eps).
class ExpWickExperiment final : public Experiment {
public:
    explicit ExpWickExperiment(double eps) : eps_(eps) {
        if (!(eps > 0.0 && eps < 0.5))
            throw UsageError("exp-wick needs epsilon in (0, 1/2) for a convergent series");
    }

    std::size_t n_outputs() const override { return 5; }

    void eval(std::uint64_t seed, std::uint64_t path_index,
              std::vector<double>& out) const override {
        CounterRng rng(seed, path_index);
        double z = rng.next_normal();
        double x = eps_ * (z * z - 1.0);
        double ex = std::exp(x);
        out = {ex * x, ex, ex * x * ex * x, ex * ex, ex * x * ex};
    }

    void finalize(const std::vector<double>& sums, std::uint64_t n,
                  ExperimentReport& rep) const override {
        double abar = sums[0] / n, bbar = sums[1] / n;
        double ratio = abar / bbar;
        double va = sums[2] / n - abar * abar;
        double vb = sums[3] / n - bbar * bbar;
        double cab = sums[4] / n - abar * bbar;
        double var = (va - 2 * ratio * cab + ratio * ratio * vb) / (bbar * bbar);
        rep.estimate = ratio;
        rep.stderr_ = std::sqrt(std::max(0.0, var) / n);
        rep.extras["target"] = 2 * eps_ * eps_ / (1 - 2 * eps_);
        rep.extras["numerator_mean"] = abar;
        rep.extras["denominator_mean"] = bbar;
    }

private:
    double eps_;
};

// Empirical second and third cumulants of a rank-one second-chaos variable
// against the trace formulas.
class Chaos2KappaExperiment final : public Experiment {
public:
    explicit Chaos2KappaExperiment(double eps)
        : sampler_({1.0},
                   {Chaos2Kernel::rank_one(Eigen::VectorXd::Ones(1),
                                           Eigen::VectorXd::Ones(1), eps, "f")},
                   /*prepend_origin=*/false),
          eps_(eps) {}

    std::size_t n_outputs() const override { return 4; }

    void eval(std::uint64_t seed, std::uint64_t path_index,
              std::vector<double>& out) const override {
        SamplePath p = sampler_.sample(seed, path_index);
        double x = p.values[0][0];
        out = {x, x * x, x * x * x, x * x * x * x};
    }

    void finalize(const std::vector<double>& sums, std::uint64_t n,
                  ExperimentReport& rep) const override {
        double m1 = sums[0] / n, m2 = sums[1] / n, m3 = sums[2] / n, m4 = sums[3] / n;
        double k2 = m2 - m1 * m1;
        double k3 = m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1;
        rep.estimate = k2;
        rep.stderr_ = std::sqrt(std::max(0.0, (m4 - m2 * m2)) / n);
        rep.extras["kappa2_empirical"] = k2;
        rep.extras["kappa3_empirical"] = k3;
        rep.extras["kappa2_trace"] = 2 * eps_ * eps_;
        rep.extras["kappa3_trace"] = 8 * eps_ * eps_ * eps_;
    }

private:
    Chaos2PathSampler sampler_;
    double eps_;
};

std::unique_ptr<Experiment> make_experiment(const ExperimentConfig& config) {
    const auto& p = config.params;
    if (config.experiment == "young-mean")
        return std::make_unique<YoungMeanExperiment>(p.value("H", 0.7), p.value("grid", 256));
    if (config.experiment == "zero-mean-wick")
        return std::make_unique<ZeroMeanWickExperiment>(
            p.value("H", 0.7), p.value("grid", 256), p.value("degree", 1));
    if (config.experiment == "scalar-identity")
        return std::make_unique<ScalarIdentityExperiment>(
            p.value("H", 0.7), p.value("grid", 256), p.value("n", 1),
            p.value("refinements", 4));
    if (config.experiment == "exp-wick")
        return std::make_unique<ExpWickExperiment>(p.value("epsilon", 0.1));
    if (config.experiment == "chaos2-kappa")
        return std::make_unique<Chaos2KappaExperiment>(p.value("epsilon", 1.0));
    throw UsageError("unknown experiment '" + config.experiment + "'");
}

} // namespace

ExperimentReport monte_carlo(const ExperimentConfig& config, std::uint64_t n_paths,
                             std::uint64_t seed, int workers) {
    if (n_paths < 100) throw UsageError("n_paths must be at least 100");
    if (workers < 1) throw UsageError("workers must be positive");
    auto experiment = make_experiment(config);
    const std::size_t nout = experiment->n_outputs();

    const std::uint64_t chunk = 1024;
    const std::uint64_t n_chunks = (n_paths + chunk - 1) / chunk;
    std::vector<std::vector<double>> chunk_sums(n_chunks, std::vector<double>(nout, 0.0));

    std::atomic<std::uint64_t> next{0};
    auto work = [&]() {
        std::vector<double> out(nout);
        for (;;) {
            std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            auto& sums = chunk_sums[c];
            const std::uint64_t lo = c * chunk;
            const std::uint64_t hi = std::min<std::uint64_t>(n_paths, lo + chunk);
            for (std::uint64_t path = lo; path < hi; ++path) {
                experiment->eval(seed, path, out);
                for (std::size_t i = 0; i < nout; ++i) sums[i] += out[i];
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    // pairwise reduction in chunk-index order: worker count cannot change
    // the summation tree
    std::vector<std::vector<double>> layer = std::move(chunk_sums);
    while (layer.size() > 1) {
        std::vector<std::vector<double>> next_layer;
        for (std::size_t i = 0; i < layer.size(); i += 2) {
            if (i + 1 < layer.size()) {
                for (std::size_t k = 0; k < nout; ++k) layer[i][k] += layer[i + 1][k];
            }
            next_layer.push_back(std::move(layer[i]));
        }
        layer = std::move(next_layer);
    }

    ExperimentReport rep;
    rep.experiment = config.experiment;
    rep.n_paths = n_paths;
    rep.seed = seed;
    rep.config_echo = config.params;
    experiment->finalize(layer.empty() ? std::vector<double>(nout, 0.0) : layer[0], n_paths,
                         rep);
    return rep;
}

} // namespace wick
