#pragma once

#include "ivreg/analysis.hpp"
#include "ivreg/operators.hpp"
#include "ivreg/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ivreg {

enum class ForwardKind { blur, identity };
enum class DebiasOperator { midpoint, noisy };

/// Everything needed to synthesise and process an instance family. Defaults
/// reproduce the standard deblurring protocol.
struct ExperimentConfig {
    std::size_t n = 128;
    double domain_length = 10.0;  ///< grid spacing is domain_length / n
    ForwardKind forward = ForwardKind::blur;
    double sigma = 0.5;
    /// Piecewise-constant ground truth: levels[k] holds on [breakpoints[k-1], breakpoints[k]).
    std::vector<double> breakpoints{2.0, 4.0, 6.5, 8.0};
    std::vector<double> levels{1.0, 3.0, 1.5, 4.0, 1.0};
    double data_noise = 0.025;      ///< fraction of max(A u)
    double operator_noise = 0.05;   ///< fraction of max a_ij
    double gamma = 1e-4;
    double eps = 1e-6;
    double nu = 1e-6;
    double c_factor = 1.01;
    double c_cap = 10.0;
    DebiasOperator debias_operator = DebiasOperator::midpoint;
    BoundsSchedule schedule{};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string output_dir = "out";

    double spacing() const { return domain_length / static_cast<double>(n); }

    /// Throws InputError naming the first offending field.
    void validate() const;

    std::string to_json() const;
    /// Missing fields keep their defaults; unknown fields are rejected.
    static ExperimentConfig from_json(const std::string& text);

    /// FNV-1a over the canonical JSON form, as 16 hex digits.
    std::string hash() const;
};

/// Synthesised problem data for one seed.
struct Instance {
    std::uint64_t seed = 0;
    Signal u_exact;
    DenseOperator a_exact;
    Signal f_exact;
    DenseOperator a_noisy;
    Signal f_noisy;
    double delta = 0.0;  ///< data noise amplitude
    double d = 0.0;      ///< operator noise amplitude
    IntervalOperator op;
    IntervalData data;
};

Signal ground_truth(const ExperimentConfig& cfg);
DenseOperator forward_operator(const ExperimentConfig& cfg);

/// Data noise is drawn from the stream Rng(seed).split(1) and operator noise
/// from the stream after it; instances that differ only in noise fractions
/// share the same random draws, so their intervals are nested.
Instance synthesize(const ExperimentConfig& cfg, std::uint64_t seed);

/// Writes ground_truth.csv, operator_exact.csv, operator_noisy.csv,
/// operator_lower.csv, operator_upper.csv, data_exact.csv, data.csv,
/// data_lower.csv, data_upper.csv and instance.json.
void save_instance(const Instance& inst, const std::filesystem::path& dir);
Instance load_instance(const std::filesystem::path& dir);

/// Checks the enclosures A^l <= A <= A^u, f^l <= f <= f^u and A^l >= 0.
bool instance_consistent(const Instance& inst, double tol = 1e-12);

}  // namespace ivreg
