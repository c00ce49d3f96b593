#pragma once

#include "ivreg/random.hpp"
#include "ivreg/signal.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace ivreg {

/// Dense linear forward operator; entries finite.
class DenseOperator {
public:
    explicit DenseOperator(Eigen::MatrixXd entries);
    static DenseOperator identity(std::size_t n);
    static DenseOperator zero(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
    const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
    double operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    Eigen::MatrixXd entries_;
};

/// Entrywise enclosure lower <= A <= upper.
class IntervalOperator {
public:
    IntervalOperator(DenseOperator lower, DenseOperator upper);
    /// Degenerate interval lower == upper == a.
    static IntervalOperator exact(const DenseOperator& a);

    const DenseOperator& lower() const noexcept { return lower_; }
    const DenseOperator& upper() const noexcept { return upper_; }
    std::size_t rows() const noexcept { return lower_.rows(); }
    std::size_t cols() const noexcept { return lower_.cols(); }
    DenseOperator midpoint() const;
    /// max_ij (upper - lower)_ij, the l1 -> linf norm of the width.
    double width() const;
    bool contains(const DenseOperator& a, double tol = 0.0) const;

private:
    DenseOperator lower_;
    DenseOperator upper_;
};

/// Elementwise data bounds lower <= f <= upper.
class IntervalData {
public:
    IntervalData(Signal lower, Signal upper);

    const Signal& lower() const noexcept { return lower_; }
    const Signal& upper() const noexcept { return upper_; }
    std::size_t size() const noexcept { return lower_.size(); }
    Signal midpoint() const;
    bool contains(const Signal& f, double tol = 0.0) const;

private:
    Signal lower_;
    Signal upper_;
};

/// Convolution with a sampled Gaussian of standard deviation `sigma` (same
/// units as the grid spacing), normalised to unit sum over the untruncated
/// stencil. Samples falling outside the domain are dropped (zero extension).
DenseOperator gaussian_convolution(const Grid& grid, double sigma);

/// a~_ij = max(a_ij + r_ij d, 0) with d = level * max_kl a_kl, r_ij in [-1, 1].
DenseOperator perturb_operator(const DenseOperator& a, double level, const Eigen::MatrixXd& r);
/// As above with r_ij drawn i.i.d. uniform on [-1, 1] from `rng`.
DenseOperator perturb_operator(const DenseOperator& a, double level, Rng rng);
DenseOperator perturb_operator(const DenseOperator& a, double level, std::uint64_t seed);

/// The `d` used by perturb_operator for a given level.
double perturbation_amplitude(const DenseOperator& a, double level);

/// lower = max(a_noisy - d, 0), upper = a_noisy + d.
IntervalOperator interval_from_noisy(const DenseOperator& a_noisy, double d);

/// lower = f - delta, upper = f + delta.
IntervalData data_bounds(const Signal& f_noisy, double delta);

/// Smallest column sum min_j sum_i a_ij; the adjoint positivity condition
/// A^T 1 >= c 1 holds iff the result is positive.
double adjoint_positivity(const DenseOperator& a);

Signal apply(const DenseOperator& a, const Signal& u);
Signal adjoint_apply(const DenseOperator& a, const Signal& v);

}  // namespace ivreg
