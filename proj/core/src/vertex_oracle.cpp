#include "ivreg/lp_builder.hpp"

#include "ivreg/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <optional>
#include <vector>

namespace ivreg::lp {

namespace {

/// {z >= 0, G z <= g, E z = e} in nonnegative variables.
struct Polyhedron {
    Eigen::MatrixXd g_mat;
    Eigen::VectorXd g_rhs;
    Eigen::MatrixXd e_mat;
    Eigen::VectorXd e_rhs;
};

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

struct Vertex {
    Eigen::VectorXd z;
    double value;
};

std::optional<Vertex> best_vertex(const Polyhedron& p, const Eigen::VectorXd& c) {
    const Eigen::Index n = c.size();
    const Eigen::Index ni = p.g_mat.rows();
    const Eigen::Index ne = p.e_mat.rows();
    const Eigen::Index rank_e = ne > 0 ? Eigen::FullPivLU<Eigen::MatrixXd>(p.e_mat).rank() : 0;
    const Eigen::Index k = n - rank_e;
    const auto pool = static_cast<std::size_t>(n + ni);
    if (binomial(pool, static_cast<std::size_t>(k)) > static_cast<double>(vertex_oracle_subset_cap))
        throw InputError("vertex_oracle: instance too large for enumeration");

    double scale = 1.0;
    if (ni > 0) scale += p.g_rhs.cwiseAbs().maxCoeff();
    if (ne > 0) scale += p.e_rhs.cwiseAbs().maxCoeff();
    const double tol = 1e-9 * scale;

    std::optional<Vertex> best;
    std::vector<Eigen::Index> pick(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;

    Eigen::MatrixXd m(ne + k, n);
    Eigen::VectorXd rhs(ne + k);
    if (ne > 0) {
        m.topRows(ne) = p.e_mat;
        rhs.head(ne) = p.e_rhs;
    }
    for (;;) {
        for (Eigen::Index r = 0; r < k; ++r) {
            const Eigen::Index row = pick[static_cast<std::size_t>(r)];
            if (row < n) {
                m.row(ne + r).setZero();
                m(ne + r, row) = 1.0;
                rhs[ne + r] = 0.0;
            } else {
                m.row(ne + r) = p.g_mat.row(row - n);
                rhs[ne + r] = p.g_rhs[row - n];
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        if (lu.rank() == n) {
            const Eigen::VectorXd z = lu.solve(rhs);
            bool ok = z.allFinite() && (m * z - rhs).cwiseAbs().maxCoeff() <= tol && z.minCoeff() >= -tol;
            if (ok && ni > 0) ok = (p.g_mat * z - p.g_rhs).maxCoeff() <= tol;
            if (ok) {
                const double v = c.dot(z);
                if (!best || v < best->value) best = Vertex{z, v};
            }
        }
        // next combination
        Eigen::Index i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == static_cast<Eigen::Index>(pool) - k + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return best;
}

}  // namespace

LpSolution vertex_oracle(const LpProblem& problem) {
    problem.validate();
    const Eigen::Index n = problem.cost.size();

    // x = shift + P z with z >= 0; free variables take two columns.
    std::vector<Eigen::Index> col_of(static_cast<std::size_t>(n));
    Eigen::Index nz = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        col_of[static_cast<std::size_t>(j)] = nz;
        nz += std::isinf(problem.lower[j]) ? 2 : 1;
    }
    Eigen::MatrixXd pmat = Eigen::MatrixXd::Zero(n, nz);
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index c = col_of[static_cast<std::size_t>(j)];
        pmat(j, c) = 1.0;
        if (std::isinf(problem.lower[j]))
            pmat(j, c + 1) = -1.0;
        else
            shift[j] = problem.lower[j];
    }

    Polyhedron poly;
    const Eigen::Index ni = problem.ineq_matrix.rows();
    const Eigen::Index ne = problem.eq_matrix.rows();
    poly.g_mat = ni > 0 ? Eigen::MatrixXd(problem.ineq_matrix * pmat) : Eigen::MatrixXd(0, nz);
    poly.g_rhs = ni > 0 ? Eigen::VectorXd(problem.ineq_rhs - problem.ineq_matrix * shift) : Eigen::VectorXd(0);
    poly.e_mat = ne > 0 ? Eigen::MatrixXd(problem.eq_matrix * pmat) : Eigen::MatrixXd(0, nz);
    poly.e_rhs = ne > 0 ? Eigen::VectorXd(problem.eq_rhs - problem.eq_matrix * shift) : Eigen::VectorXd(0);
    const Eigen::VectorXd cz = pmat.transpose() * problem.cost;

    LpSolution sol;
    const auto vertex = best_vertex(poly, cz);
    if (!vertex) {
        sol.status = Status::infeasible;
        sol.objective = std::numeric_limits<double>::infinity();
        return sol;
    }

    // Extreme rays of the recession cone, normalised by sum(d) = 1.
    Polyhedron cone;
    cone.g_mat = poly.g_mat;
    cone.g_rhs = Eigen::VectorXd::Zero(ni);
    cone.e_mat.resize(ne + 1, nz);
    if (ne > 0) cone.e_mat.topRows(ne) = poly.e_mat;
    cone.e_mat.row(ne).setOnes();
    cone.e_rhs = Eigen::VectorXd::Zero(ne + 1);
    cone.e_rhs[ne] = 1.0;
    const auto ray = best_vertex(cone, cz);
    const double ctol = 1e-9 * (1.0 + (cz.size() > 0 ? cz.cwiseAbs().maxCoeff() : 0.0));
    if (ray && ray->value < -ctol) {
        sol.status = Status::unbounded;
        sol.x = shift + pmat * vertex->z;
        sol.objective = -std::numeric_limits<double>::infinity();
        return sol;
    }

    sol.status = Status::optimal;
    sol.x = shift + pmat * vertex->z;
    sol.objective = problem.cost.dot(sol.x);
    return sol;
}

}  // namespace ivreg::lp
