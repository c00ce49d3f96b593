#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ivreg {

/// Uniform 1-D grid with `n` samples spaced `h` apart.
class Grid {
public:
    explicit Grid(std::size_t n, double h = 1.0);

    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double coordinate(std::size_t i) const noexcept { return h_ * static_cast<double>(i); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t n_;
    double h_;
};

/// Sampled function on a Grid. Entries are always finite.
class Signal {
public:
    Signal(Grid grid, Eigen::VectorXd values);
    Signal(Grid grid, std::initializer_list<double> values);
    static Signal zeros(Grid grid);
    static Signal constant(Grid grid, double value);
    /// Unit-spaced grid sized to `values`.
    static Signal from(std::initializer_list<double> values);
    static Signal from(std::span<const double> values, double h = 1.0);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_.size(); }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    std::vector<double> to_vector() const;

    Signal with_values(Eigen::VectorXd values) const { return Signal(grid_, std::move(values)); }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

/// Throws InputError if the grids differ.
void require_same_grid(const Signal& a, const Signal& b, const char* what);

/// Sorted, duplicate-free indices into a grid of size `universe`.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::vector<std::size_t> indices, std::size_t universe);

    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    std::size_t universe() const noexcept { return universe_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    bool contains(std::size_t i) const;

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::vector<std::size_t> indices_;
    std::size_t universe_ = 0;
};

/// Forward differences (Du)_i = u_{i+1} - u_i, length n-1.
Eigen::VectorXd forward_difference(const Eigen::VectorXd& u);
/// Adjoint of forward_difference: maps length n-1 to length n.
Eigen::VectorXd forward_difference_adjoint(const Eigen::VectorXd& s);

/// Discrete total variation with unit weights: sum_i |u_{i+1} - u_i|.
double tv(const Signal& u);
double tv(const Eigen::VectorXd& u);
double l1_norm(const Signal& u);
double l1_norm(const Eigen::VectorXd& u);
double linf_norm(const Signal& u);
double linf_norm(const Eigen::VectorXd& u);

}  // namespace ivreg
