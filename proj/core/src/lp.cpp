#include "ivreg/lp.hpp"

#include "ivreg/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ivreg::lp {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr double inf = std::numeric_limits<double>::infinity();

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

std::string_view to_string(Status status) noexcept {
    switch (status) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

LpProblem LpProblem::with_variables(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    LpProblem p;
    p.cost = Eigen::VectorXd::Zero(k);
    p.ineq_matrix = Eigen::MatrixXd::Zero(0, k);
    p.ineq_rhs = Eigen::VectorXd::Zero(0);
    p.eq_matrix = Eigen::MatrixXd::Zero(0, k);
    p.eq_rhs = Eigen::VectorXd::Zero(0);
    p.lower = Eigen::VectorXd::Zero(k);
    return p;
}

void LpProblem::validate() const {
    const Eigen::Index n = cost.size();
    if (n == 0) throw InputError("LpProblem: no variables");
    if (lower.size() != n) throw InputError("LpProblem: lower bound length differs from cost length");
    if (ineq_matrix.rows() != ineq_rhs.size())
        throw InputError("LpProblem: inequality matrix rows differ from rhs length");
    if (eq_matrix.rows() != eq_rhs.size())
        throw InputError("LpProblem: equality matrix rows differ from rhs length");
    if (ineq_matrix.rows() > 0 && ineq_matrix.cols() != n)
        throw InputError("LpProblem: inequality matrix has wrong column count");
    if (eq_matrix.rows() > 0 && eq_matrix.cols() != n)
        throw InputError("LpProblem: equality matrix has wrong column count");
    if (!cost.allFinite() || !all_finite(ineq_matrix) || !ineq_rhs.allFinite() || !all_finite(eq_matrix) ||
        !eq_rhs.allFinite())
        throw InputError("LpProblem: non-finite entry");
    for (Eigen::Index j = 0; j < n; ++j)
        if (std::isnan(lower[j]) || lower[j] == inf) throw InputError("LpProblem: invalid lower bound");
}

OptimalityReport check_optimality(const LpProblem& p, const LpSolution& s) {
    OptimalityReport r;
    const double scale = 1.0 + max_abs(p.ineq_rhs) + max_abs(p.eq_rhs);
    double primal = 0.0;
    if (p.num_inequalities() > 0) {
        const Eigen::VectorXd slack = p.ineq_rhs - p.ineq_matrix * s.x;
        primal = std::max(primal, std::max(0.0, -slack.minCoeff()));
        r.complementarity += std::abs(s.ineq_duals.dot(slack));
    }
    if (p.num_equalities() > 0) primal = std::max(primal, max_abs(p.eq_matrix * s.x - p.eq_rhs));
    double dual = 0.0;
    if (s.ineq_duals.size() > 0) dual = std::max(dual, std::max(0.0, -s.ineq_duals.minCoeff()));
    for (Eigen::Index j = 0; j < p.cost.size(); ++j) {
        if (std::isinf(p.lower[j])) {
            dual = std::max(dual, std::abs(s.reduced_costs[j]));
        } else {
            primal = std::max(primal, std::max(0.0, p.lower[j] - s.x[j]));
            dual = std::max(dual, std::max(0.0, -s.reduced_costs[j]));
            r.complementarity += std::abs(s.reduced_costs[j] * (s.x[j] - p.lower[j]));
        }
    }
    r.primal_infeasibility = primal / scale;
    r.dual_infeasibility = dual;
    r.complementarity /= 1.0 + max_abs(p.ineq_rhs);
    r.duality_gap = std::abs(s.objective - s.dual_objective) / (1.0 + std::abs(s.objective));
    return r;
}

struct SimplexSolver::Impl {
    LpProblem prob;
    SimplexOptions opt;

    Eigen::Index m = 0;   // standard-form rows
    Eigen::Index ns = 0;  // structural columns
    Eigen::Index nc = 0;  // all columns (structural, slack, artificial)
    std::vector<Eigen::Index> pos_col, neg_col;
    Eigen::VectorXd shift;
    std::vector<Eigen::Index> row_origin;  // index into [ineq rows | eq rows as (+,-) pairs]
    Eigen::Index first_artificial = 0;

    RowMatrix tab;   // m + 1 rows; last row holds reduced costs, last column the rhs
    RowMatrix base;  // original standard-form rows, used for refactorisation
    std::vector<Eigen::Index> basis;
    std::vector<char> in_basis, blocked;
    Eigen::VectorXd phase_cost;
    std::size_t since_refactor = 0;

    enum class State { fresh, infeasible, ready } state = State::fresh;

    Impl(LpProblem p, SimplexOptions o) : prob(std::move(p)), opt(o) {
        prob.validate();
        build();
    }

    Eigen::Index rhs_col() const { return nc; }

    void build() {
        const Eigen::Index n = prob.cost.size();
        const Eigen::Index ni = prob.ineq_matrix.rows();
        const Eigen::Index ne = prob.eq_matrix.rows();

        pos_col.assign(static_cast<std::size_t>(n), -1);
        neg_col.assign(static_cast<std::size_t>(n), -1);
        shift = Eigen::VectorXd::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            pos_col[static_cast<std::size_t>(j)] = ns++;
            if (std::isinf(prob.lower[j]))
                neg_col[static_cast<std::size_t>(j)] = ns++;
            else
                shift[j] = prob.lower[j];
        }

        // Gather rows as (coefficients over original variables, rhs), dropping empty ones.
        struct RawRow {
            Eigen::Index origin;
            Eigen::VectorXd coef;
            double rhs;
        };
        std::vector<RawRow> rows;
        bool empty_infeasible = false;
        auto push = [&](Eigen::Index origin, Eigen::VectorXd coef, double rhs, bool equality) {
            if (coef.size() == 0 || coef.cwiseAbs().maxCoeff() == 0.0) {
                if (equality ? std::abs(rhs) > opt.feasibility_tol : rhs < -opt.feasibility_tol)
                    empty_infeasible = true;
                return;
            }
            rhs -= coef.dot(shift);
            rows.push_back({origin, std::move(coef), rhs});
        };
        for (Eigen::Index i = 0; i < ni; ++i) push(i, prob.ineq_matrix.row(i).transpose(), prob.ineq_rhs[i], false);
        for (Eigen::Index q = 0; q < ne; ++q) {
            const Eigen::VectorXd a = prob.eq_matrix.row(q).transpose();
            push(ni + 2 * q, a, prob.eq_rhs[q], true);
            if (a.cwiseAbs().maxCoeff() > 0.0) push(ni + 2 * q + 1, -a, -prob.eq_rhs[q], true);
        }
        if (empty_infeasible) {
            state = State::infeasible;
            return;
        }

        m = static_cast<Eigen::Index>(rows.size());
        Eigen::Index na = 0;
        for (const auto& r : rows)
            if (r.rhs < 0.0) ++na;
        first_artificial = ns + m;
        nc = ns + m + na;

        base = RowMatrix::Zero(m, nc + 1);
        basis.assign(static_cast<std::size_t>(m), -1);
        row_origin.resize(static_cast<std::size_t>(m));
        Eigen::Index art = first_artificial;
        for (Eigen::Index k = 0; k < m; ++k) {
            const auto& r = rows[static_cast<std::size_t>(k)];
            row_origin[static_cast<std::size_t>(k)] = r.origin;
            const double sign = r.rhs < 0.0 ? -1.0 : 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double a = sign * r.coef[j];
                if (a == 0.0) continue;
                base(k, pos_col[static_cast<std::size_t>(j)]) = a;
                if (neg_col[static_cast<std::size_t>(j)] >= 0) base(k, neg_col[static_cast<std::size_t>(j)]) = -a;
            }
            base(k, ns + k) = sign;
            base(k, nc) = sign * r.rhs;
            if (sign < 0.0) {
                base(k, art) = 1.0;
                basis[static_cast<std::size_t>(k)] = art++;
            } else {
                basis[static_cast<std::size_t>(k)] = ns + k;
            }
        }
        tab = RowMatrix::Zero(m + 1, nc + 1);
        tab.topRows(m) = base;
        in_basis.assign(static_cast<std::size_t>(nc), 0);
        for (auto b : basis) in_basis[static_cast<std::size_t>(b)] = 1;
        blocked.assign(static_cast<std::size_t>(nc), 0);
    }

    void set_objective_row(const Eigen::VectorXd& cost) {
        phase_cost = cost;
        Eigen::VectorXd cb(m);
        for (Eigen::Index k = 0; k < m; ++k) cb[k] = cost[basis[static_cast<std::size_t>(k)]];
        tab.row(m).head(nc) = cost.transpose();
        tab(m, nc) = 0.0;
        if (m > 0) tab.row(m).noalias() -= cb.transpose() * tab.topRows(m);
        for (auto b : basis) tab(m, b) = 0.0;
    }

    void pivot(Eigen::Index r, Eigen::Index e) {
        tab.row(r) /= tab(r, e);
        for (Eigen::Index i = 0; i <= m; ++i) {
            if (i == r) continue;
            const double f = tab(i, e);
            if (f == 0.0) continue;
            tab.row(i).noalias() -= f * tab.row(r);
            tab(i, e) = 0.0;
        }
        tab(r, e) = 1.0;
        in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)])] = 0;
        in_basis[static_cast<std::size_t>(e)] = 1;
        basis[static_cast<std::size_t>(r)] = e;
        ++since_refactor;
    }

    /// Recompute the tableau as B^{-1} [A | b] from the original rows.
    void refactor() {
        since_refactor = 0;
        if (m == 0) return;
        Eigen::MatrixXd b(m, m);
        for (Eigen::Index k = 0; k < m; ++k) b.col(k) = base.col(basis[static_cast<std::size_t>(k)]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
        if (!(lu.rcond() > 1e-13)) return;
        const Eigen::MatrixXd fresh = lu.solve(Eigen::MatrixXd(base));
        if (!fresh.allFinite()) return;
        tab.topRows(m) = fresh;
        for (Eigen::Index k = 0; k < m; ++k) {
            const Eigen::Index c = basis[static_cast<std::size_t>(k)];
            tab.col(c).head(m).setZero();
            tab(k, c) = 1.0;
        }
        set_objective_row(phase_cost);
    }

    double objective_value() const { return -tab(m, nc); }

    Status iterate(std::size_t& iterations) {
        const std::size_t stall_limit = 5 * static_cast<std::size_t>(m + nc);
        double best = objective_value();
        std::size_t stall = 0;
        bool bland = false;
        for (;;) {
            if (iterations >= opt.max_iterations) return Status::iteration_limit;

            Eigen::Index e = -1;
            double most = -opt.optimality_tol;
            for (Eigen::Index j = 0; j < nc; ++j) {
                if (blocked[static_cast<std::size_t>(j)] || in_basis[static_cast<std::size_t>(j)]) continue;
                const double d = tab(m, j);
                if (d < most) {
                    most = d;
                    e = j;
                    if (bland) break;
                }
            }
            if (e < 0) return Status::optimal;

            Eigen::Index r = -1;
            double theta = inf;
            for (Eigen::Index i = 0; i < m; ++i) {
                const double a = tab(i, e);
                if (a <= opt.pivot_tol) continue;
                const double ratio = std::max(tab(i, nc), 0.0) / a;
                if (r < 0 || ratio < theta - 1e-12 * (1.0 + theta)) {
                    r = i;
                    theta = ratio;
                } else if (ratio <= theta + 1e-12 * (1.0 + theta)) {
                    const bool better = bland ? basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(r)]
                                              : a > tab(r, e);
                    if (better) {
                        r = i;
                        theta = std::min(theta, ratio);
                    }
                }
            }
            if (r < 0) return Status::unbounded;

            pivot(r, e);
            ++iterations;
            const double obj = objective_value();
            if (obj < best - 1e-12 * (1.0 + std::abs(best))) {
                best = obj;
                stall = 0;
                bland = false;
            } else if (++stall > stall_limit) {
                bland = true;
            }
            if (since_refactor >= opt.refactor_interval) refactor();
        }
    }

    Eigen::VectorXd structural_cost(const Eigen::VectorXd& c) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(nc);
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            out[pos_col[static_cast<std::size_t>(j)]] = c[j];
            if (neg_col[static_cast<std::size_t>(j)] >= 0) out[neg_col[static_cast<std::size_t>(j)]] = -c[j];
        }
        return out;
    }

    Status phase_one(std::size_t& iterations) {
        if (first_artificial == nc) return Status::optimal;
        Eigen::VectorXd c1 = Eigen::VectorXd::Zero(nc);
        c1.tail(nc - first_artificial).setOnes();
        set_objective_row(c1);
        const Status s = iterate(iterations);
        if (s == Status::iteration_limit) return s;
        if (since_refactor > 0) {
            refactor();
            const Status again = iterate(iterations);
            if (again == Status::iteration_limit) return again;
        }
        const double scale = 1.0 + (m > 0 ? base.col(nc).cwiseAbs().maxCoeff() : 0.0);
        if (objective_value() > opt.feasibility_tol * scale) return Status::infeasible;

        // Drive remaining artificials out of the basis where possible.
        for (Eigen::Index k = 0; k < m; ++k) {
            if (basis[static_cast<std::size_t>(k)] < first_artificial) continue;
            Eigen::Index best = -1;
            double mag = 1e-9;
            for (Eigen::Index j = 0; j < first_artificial; ++j) {
                if (in_basis[static_cast<std::size_t>(j)]) continue;
                if (std::abs(tab(k, j)) > mag) {
                    mag = std::abs(tab(k, j));
                    best = j;
                }
            }
            if (best >= 0) pivot(k, best);
        }
        for (Eigen::Index j = first_artificial; j < nc; ++j) blocked[static_cast<std::size_t>(j)] = 1;
        return Status::optimal;
    }

    LpSolution extract(Status status, std::size_t iterations) const {
        const Eigen::Index n = prob.cost.size();
        LpSolution sol;
        sol.status = status;
        sol.iterations = iterations;
        Eigen::VectorXd xs = Eigen::VectorXd::Zero(nc);
        for (Eigen::Index k = 0; k < m; ++k) xs[basis[static_cast<std::size_t>(k)]] = tab(k, nc);
        sol.x.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            double v = shift[j] + std::max(xs[pos_col[static_cast<std::size_t>(j)]], 0.0);
            if (neg_col[static_cast<std::size_t>(j)] >= 0) v -= std::max(xs[neg_col[static_cast<std::size_t>(j)]], 0.0);
            sol.x[j] = v;
        }
        const Eigen::Index ni = prob.ineq_matrix.rows();
        sol.ineq_duals = Eigen::VectorXd::Zero(ni);
        sol.eq_duals = Eigen::VectorXd::Zero(prob.eq_matrix.rows());
        for (Eigen::Index k = 0; k < m; ++k) {
            const double y = tab(m, ns + k);
            const Eigen::Index o = row_origin[static_cast<std::size_t>(k)];
            if (o < ni)
                sol.ineq_duals[o] = y;
            else
                sol.eq_duals[(o - ni) / 2] += ((o - ni) % 2 == 0) ? y : -y;
        }
        sol.reduced_costs = prob.cost;
        if (ni > 0) sol.reduced_costs.noalias() += prob.ineq_matrix.transpose() * sol.ineq_duals;
        if (sol.eq_duals.size() > 0) sol.reduced_costs.noalias() += prob.eq_matrix.transpose() * sol.eq_duals;
        sol.objective = prob.cost.dot(sol.x);
        double dual = 0.0;
        if (ni > 0) dual -= prob.ineq_rhs.dot(sol.ineq_duals);
        if (sol.eq_duals.size() > 0) dual -= prob.eq_rhs.dot(sol.eq_duals);
        for (Eigen::Index j = 0; j < n; ++j)
            if (!std::isinf(prob.lower[j])) dual += sol.reduced_costs[j] * prob.lower[j];
        sol.dual_objective = dual;
        return sol;
    }

    LpSolution failure(Status status, std::size_t iterations) const {
        LpSolution sol;
        sol.status = status;
        sol.iterations = iterations;
        sol.objective = status == Status::unbounded ? -inf : inf;
        return sol;
    }

    LpSolution run(const Eigen::VectorXd& cost) {
        if (cost.size() != prob.cost.size()) throw InputError("SimplexSolver: cost vector has wrong length");
        if (!cost.allFinite()) throw InputError("SimplexSolver: non-finite cost");
        prob.cost = cost;
        std::size_t iterations = 0;
        if (state == State::infeasible) return failure(Status::infeasible, 0);
        if (state == State::fresh) {
            const Status s = phase_one(iterations);
            if (s == Status::infeasible) {
                state = State::infeasible;
                return failure(s, iterations);
            }
            if (s != Status::optimal) return failure(s, iterations);
            state = State::ready;
        }
        set_objective_row(structural_cost(cost));
        Status s = iterate(iterations);
        if (s == Status::unbounded) {
            LpSolution sol = extract(s, iterations);
            sol.objective = -inf;
            return sol;
        }
        if (s != Status::optimal) return failure(s, iterations);

        LpSolution sol = extract(s, iterations);
        if (since_refactor > 0) {
            const OptimalityReport rep = check_optimality(prob, sol);
            if (rep.primal_infeasibility > 1e-11 || rep.dual_infeasibility > 1e-11) {
                refactor();
                s = iterate(iterations);
                if (s != Status::optimal) return failure(s, iterations);
                sol = extract(s, iterations);
            }
        }
        return sol;
    }
};

SimplexSolver::SimplexSolver(LpProblem problem, SimplexOptions options)
    : impl_(std::make_unique<Impl>(std::move(problem), options)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

const LpProblem& SimplexSolver::problem() const noexcept { return impl_->prob; }

LpSolution SimplexSolver::solve() { return impl_->run(Eigen::VectorXd(impl_->prob.cost)); }

LpSolution SimplexSolver::resolve(const Eigen::VectorXd& cost) { return impl_->run(cost); }

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
    SimplexSolver solver(problem, options);
    return solver.solve();
}

}  // namespace ivreg::lp
