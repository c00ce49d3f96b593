#include "ivreg/signal.hpp"

#include "ivreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ivreg {

Grid::Grid(std::size_t n, double h) : n_(n), h_(h) {
    if (n < 2) {
        throw InputError("Grid: need at least 2 samples, got " + std::to_string(n));
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InputError("Grid: spacing must be positive and finite");
    }
}

Signal::Signal(Grid grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
        throw InputError("Signal: " + std::to_string(values_.size()) + " values for a grid of " +
                         std::to_string(grid_.size()));
    }
    if (!values_.allFinite()) {
        throw InputError("Signal: non-finite entry");
    }
}

Signal::Signal(Grid grid, std::initializer_list<double> values)
    : Signal(grid, Eigen::Map<const Eigen::VectorXd>(values.begin(),
                                                     static_cast<Eigen::Index>(values.size()))) {}

Signal Signal::zeros(Grid grid) {
    return Signal(grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size())));
}

Signal Signal::constant(Grid grid, double value) {
    return Signal(grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), value));
}

Signal Signal::from(std::initializer_list<double> values) {
    return Signal(Grid(values.size()), values);
}

Signal Signal::from(std::span<const double> values, double h) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                          static_cast<Eigen::Index>(values.size()));
    return Signal(Grid(values.size(), h), std::move(v));
}

std::vector<double> Signal::to_vector() const {
    return {values_.data(), values_.data() + values_.size()};
}

void require_same_grid(const Signal& a, const Signal& b, const char* what) {
    if (a.grid() != b.grid()) {
        throw InputError(std::string(what) + ": grid mismatch");
    }
}

IndexSet::IndexSet(std::vector<std::size_t> indices, std::size_t universe)
    : indices_(std::move(indices)), universe_(universe) {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (indices_[k] >= universe_) {
            throw InputError("IndexSet: index " + std::to_string(indices_[k]) + " out of range");
        }
        if (k > 0 && indices_[k] <= indices_[k - 1]) {
            throw InputError("IndexSet: indices must be strictly increasing");
        }
    }
}

bool IndexSet::contains(std::size_t i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

Eigen::VectorXd forward_difference(const Eigen::VectorXd& u) {
    const Eigen::Index n = u.size();
    if (n < 2) return Eigen::VectorXd(0);
    return u.tail(n - 1) - u.head(n - 1);
}

Eigen::VectorXd forward_difference_adjoint(const Eigen::VectorXd& s) {
    const Eigen::Index m = s.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m + 1);
    out.head(m) -= s;
    out.tail(m) += s;
    return out;
}

double tv(const Eigen::VectorXd& u) { return forward_difference(u).cwiseAbs().sum(); }

double tv(const Signal& u) { return tv(u.values()); }

double l1_norm(const Eigen::VectorXd& u) { return u.cwiseAbs().sum(); }

double l1_norm(const Signal& u) { return l1_norm(u.values()); }

double linf_norm(const Eigen::VectorXd& u) { return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff(); }

double linf_norm(const Signal& u) { return linf_norm(u.values()); }

}  // namespace ivreg
