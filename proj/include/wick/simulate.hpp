#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wick/chaos2.hpp"
#include "wick/integrals.hpp"
#include "wick/rng.hpp"

namespace wick {

/// Exact fBm sampler: dense Cholesky factor of the covariance on the given
/// grid (desk scale keeps O(n^3) affordable and avoids circulant edge
/// cases). Identical (seed, path_index) gives identical paths.
class FbmSampler {
public:
    FbmSampler(double H, std::vector<double> times);

    SamplePath sample(std::uint64_t seed, std::uint64_t path_index) const;
    const std::vector<double>& grid_with_origin() const { return full_times_; }

private:
    double H_;
    std::vector<double> times_;      // strictly increasing, positive
    std::vector<double> full_times_; // with the origin prepended
    Eigen::MatrixXd chol_;
};

std::vector<double> uniform_grid(double T, int intervals); // (0, T], n points

/// Finite-rank second-chaos path: one Gaussian vector Z on the kernel grid
/// drives every time, X_t = Z' C_t Z - Tr(C_t).
class Chaos2PathSampler {
public:
    Chaos2PathSampler(std::vector<double> times, std::vector<Chaos2Kernel> kernels,
                      bool prepend_origin = true);

    SamplePath sample(std::uint64_t seed, std::uint64_t path_index) const;
    const std::vector<double>& times() const { return times_; }

private:
    std::vector<double> times_;
    std::vector<Eigen::MatrixXd> scaled_;
    std::vector<double> traces_;
    int grid_size_ = 0;
    bool prepend_origin_ = true;
};

struct ExperimentConfig {
    std::string experiment;
    nlohmann::json params = nlohmann::json::object();
};

struct ExperimentReport {
    std::string experiment;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t seed = 0;
    nlohmann::json config_echo;
    nlohmann::json extras = nlohmann::json::object();

    /// Canonical serialization; independent of worker count by design.
    std::string to_json() const;
};

/// Runs the named experiment over per-path substreams and aggregates with
/// a fixed chunked pairwise reduction, so the report is byte-identical for
/// any worker count.
ExperimentReport monte_carlo(const ExperimentConfig& config, std::uint64_t n_paths,
                             std::uint64_t seed, int workers = 1);

} // namespace wick
