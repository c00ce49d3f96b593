#include "ivreg/operators.hpp"

#include "ivreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ivreg {

DenseOperator::DenseOperator(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (!entries_.allFinite()) {
        throw InputError("DenseOperator: non-finite entry");
    }
}

DenseOperator DenseOperator::identity(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return DenseOperator(Eigen::MatrixXd::Identity(k, k));
}

DenseOperator DenseOperator::zero(std::size_t rows, std::size_t cols) {
    return DenseOperator(
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
}

IntervalOperator::IntervalOperator(DenseOperator lower, DenseOperator upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.rows() != upper_.rows() || lower_.cols() != upper_.cols()) {
        throw InputError("IntervalOperator: lower and upper differ in shape");
    }
    if ((lower_.matrix().array() > upper_.matrix().array()).any()) {
        throw InputError("IntervalOperator: lower exceeds upper");
    }
}

IntervalOperator IntervalOperator::exact(const DenseOperator& a) { return {a, a}; }

DenseOperator IntervalOperator::midpoint() const {
    return DenseOperator(0.5 * (lower_.matrix() + upper_.matrix()));
}

double IntervalOperator::width() const {
    if (rows() == 0 || cols() == 0) return 0.0;
    return (upper_.matrix() - lower_.matrix()).maxCoeff();
}

bool IntervalOperator::contains(const DenseOperator& a, double tol) const {
    if (a.rows() != rows() || a.cols() != cols()) return false;
    return (a.matrix().array() >= lower_.matrix().array() - tol).all() &&
           (a.matrix().array() <= upper_.matrix().array() + tol).all();
}

IntervalData::IntervalData(Signal lower, Signal upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_grid(lower_, upper_, "IntervalData");
    if ((lower_.values().array() > upper_.values().array()).any()) {
        throw InputError("IntervalData: lower exceeds upper");
    }
}

Signal IntervalData::midpoint() const {
    return lower_.with_values(0.5 * (lower_.values() + upper_.values()));
}

bool IntervalData::contains(const Signal& f, double tol) const {
    if (f.grid() != lower_.grid()) return false;
    return (f.values().array() >= lower_.values().array() - tol).all() &&
           (f.values().array() <= upper_.values().array() + tol).all();
}

DenseOperator gaussian_convolution(const Grid& grid, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InputError("gaussian_convolution: sigma must be positive");
    }
    const double h = grid.spacing();
    // exp(-x) underflows to zero past x ~ 745; the stencil beyond that adds nothing.
    const double reach = std::sqrt(2.0 * 745.0) * sigma / h;
    const auto half = static_cast<long>(std::ceil(reach));
    std::vector<double> kernel(static_cast<std::size_t>(half) + 1);
    double total = 0.0;
    for (long m = 0; m <= half; ++m) {
        const double x = static_cast<double>(m) * h / sigma;
        kernel[static_cast<std::size_t>(m)] = std::exp(-0.5 * x * x);
        total += (m == 0 ? 1.0 : 2.0) * kernel[static_cast<std::size_t>(m)];
    }
    for (double& k : kernel) k /= total;

    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto offset = static_cast<std::size_t>(i > j ? i - j : j - i);
            if (offset < kernel.size()) a(i, j) = kernel[offset];
        }
    }
    return DenseOperator(std::move(a));
}

double perturbation_amplitude(const DenseOperator& a, double level) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return level * a.matrix().maxCoeff();
}

DenseOperator perturb_operator(const DenseOperator& a, double level, const Eigen::MatrixXd& r) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InputError("perturb_operator: level must lie in (0, 1)");
    }
    if (r.rows() != a.matrix().rows() || r.cols() != a.matrix().cols()) {
        throw InputError("perturb_operator: noise matrix shape mismatch");
    }
    const double d = perturbation_amplitude(a, level);
    return DenseOperator((a.matrix() + d * r).cwiseMax(0.0));
}

DenseOperator perturb_operator(const DenseOperator& a, double level, Rng rng) {
    Eigen::MatrixXd r(a.matrix().rows(), a.matrix().cols());
    // Row-major draw order so results do not depend on Eigen's storage order.
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = rng.uniform(-1.0, 1.0);
    }
    return perturb_operator(a, level, r);
}

DenseOperator perturb_operator(const DenseOperator& a, double level, std::uint64_t seed) {
    return perturb_operator(a, level, Rng(seed));
}

IntervalOperator interval_from_noisy(const DenseOperator& a_noisy, double d) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
        throw InputError("interval_from_noisy: d must be nonnegative");
    }
    const Eigen::MatrixXd& m = a_noisy.matrix();
    return {DenseOperator((m.array() - d).cwiseMax(0.0).matrix()),
            DenseOperator((m.array() + d).matrix())};
}

IntervalData data_bounds(const Signal& f_noisy, double delta) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw InputError("data_bounds: delta must be nonnegative");
    }
    return {f_noisy.with_values(f_noisy.values().array() - delta),
            f_noisy.with_values(f_noisy.values().array() + delta)};
}

double adjoint_positivity(const DenseOperator& a) {
    if (a.cols() == 0) return 0.0;
    if (a.rows() == 0) return 0.0;
    return a.matrix().colwise().sum().minCoeff();
}

Signal apply(const DenseOperator& a, const Signal& u) {
    if (a.cols() != u.size()) {
        throw InputError("apply: operator has " + std::to_string(a.cols()) + " columns, signal has " +
                         std::to_string(u.size()) + " samples");
    }
    Grid out = a.rows() == u.size() ? u.grid() : Grid(a.rows(), u.grid().spacing());
    return Signal(out, a.matrix() * u.values());
}

Signal adjoint_apply(const DenseOperator& a, const Signal& v) {
    if (a.rows() != v.size()) {
        throw InputError("adjoint_apply: operator has " + std::to_string(a.rows()) +
                         " rows, signal has " + std::to_string(v.size()) + " samples");
    }
    Grid out = a.cols() == v.size() ? v.grid() : Grid(a.cols(), v.grid().spacing());
    return Signal(out, a.matrix().transpose() * v.values());
}

}  // namespace ivreg
