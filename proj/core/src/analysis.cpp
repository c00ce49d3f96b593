#include "ivreg/analysis.hpp"

#include "ivreg/errors.hpp"
#include "ivreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ivreg {

void BoundsSchedule::validate() const {
    if (!(eps0 > 0.0)) throw InputError("BoundsSchedule: eps0 must be positive");
    if (!(decay > 0.0 && decay <= 1.0)) throw InputError("BoundsSchedule: decay must lie in (0, 1]");
    if (!(c0 >= 1.0)) throw InputError("BoundsSchedule: c0 must be >= 1");
    if (!(d0 >= 0.0)) throw InputError("BoundsSchedule: d0 must be >= 0");
    if (steps == 0) throw InputError("BoundsSchedule: need at least one step");
}

double BoundsSchedule::eps(std::size_t n) const { return eps0 * std::pow(decay, static_cast<double>(n)); }

std::vector<BoundsStep> generate_bounds_sequence(const BoundsSchedule& schedule, const Signal& f_exact,
                                                 const DenseOperator& a_exact, std::uint64_t seed) {
    schedule.validate();
    if (a_exact.rows() != f_exact.size()) throw InputError("generate_bounds: operator rows differ from data length");
    Rng data_rng = Rng(seed).split(11);
    Rng op_rng = Rng(seed).split(12);
    const Eigen::VectorXd& f = f_exact.values();
    const Eigen::MatrixXd& a = a_exact.matrix();
    const Eigen::Index m = f.size();

    std::vector<BoundsStep> out;
    out.reserve(schedule.steps);
    for (std::size_t k = 0; k < schedule.steps; ++k) {
        const double eps = schedule.eps(k);
        const double eta = schedule.eta(k);
        Eigen::VectorXd fu(m), fl(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            fu[i] = f[i] + data_rng.uniform(eps, schedule.c0 * eps);
            fl[i] = f[i] - data_rng.uniform(eps, schedule.c0 * eps);
        }
        Eigen::MatrixXd al(a.rows(), a.cols()), au(a.rows(), a.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                al(i, j) = std::max(a(i, j) - eta * op_rng.uniform(0.0, 1.0), 0.0);
                au(i, j) = a(i, j) + eta * op_rng.uniform(0.0, 1.0);
            }
        if (!out.empty()) {
            const auto& prev = out.back();
            fu = fu.cwiseMin(prev.data.upper().values());
            fl = fl.cwiseMax(prev.data.lower().values());
            al = al.cwiseMax(prev.op.lower().matrix());
            au = au.cwiseMin(prev.op.upper().matrix());
        }
        out.push_back({IntervalData(f_exact.with_values(fl), f_exact.with_values(fu)),
                       IntervalOperator(DenseOperator(al), DenseOperator(au))});
    }
    return out;
}

BoundsStep generate_bounds(const BoundsSchedule& schedule, const Signal& f_exact, const DenseOperator& a_exact,
                           std::size_t n, std::uint64_t seed) {
    if (n >= schedule.steps) throw InputError("generate_bounds: step index beyond the schedule");
    BoundsSchedule upto = schedule;
    upto.steps = n + 1;
    return generate_bounds_sequence(upto, f_exact, a_exact, seed).back();
}

std::optional<double> loglog_slope(const std::vector<double>& eps, const std::vector<double>& d) {
    if (eps.size() != d.size()) throw InputError("loglog_slope: length mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (eps[i] > 0.0 && d[i] > 0.0 && std::isfinite(d[i])) {
            x.push_back(std::log(eps[i]));
            y.push_back(std::log(d[i]));
        }
    if (x.size() < 2) return std::nullopt;
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 1e-24)) return std::nullopt;
    return sxy / sxx;
}

std::string RateTable::to_csv() const {
    std::ostringstream os;
    os << "n,eps,bregman,objective";
    for (std::size_t k = 0; k < thresholds.size(); ++k) os << ",hausdorff_t" << k + 1;
    os << '\n';
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        os << r.step << ',' << num(r.eps) << ',' << num(r.bregman) << ',' << num(r.objective);
        for (double h : r.hausdorff) os << ',' << num(h);
        os << '\n';
    }
    return os.str();
}

RateExperiment rate_experiment(const Regularizer& j, const BoundsSchedule& schedule, const Signal& f_exact,
                               const DenseOperator& a_exact, const Signal& u_exact, std::uint64_t seed,
                               std::vector<double> thresholds) {
    RateExperiment out{min_norm_certificate(j, a_exact, u_exact), {}};
    if (!out.reference.feasible()) return out;
    if (thresholds.empty()) thresholds = default_thresholds(u_exact);
    out.table.thresholds = thresholds;

    const auto steps = generate_bounds_sequence(schedule, f_exact, a_exact, seed);
    std::vector<double> eps, dist;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto rep = solve_primal(j, steps[k].op, steps[k].data);
        if (!rep.optimal())
            throw SolveError("rate_experiment: step " + std::to_string(k) + " ended with status " +
                             std::string(lp::to_string(rep.status)));
        RateRow row{k,
                    schedule.eps(k),
                    symm_bregman(rep.certificate.p, out.reference.p, rep.u, u_exact),
                    rep.objective,
                    hausdorff_levelsets(rep.u, u_exact, thresholds),
                    rep.u,
                    rep.certificate.p};
        eps.push_back(row.eps);
        dist.push_back(row.bregman);
        out.table.rows.push_back(std::move(row));
    }
    out.table.slope = loglog_slope(eps, dist);
    return out;
}

IndexSet level_set(const Signal& u, double t) {
    if (!(t > 0.0)) throw InputError("level_set: threshold must be positive");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] >= t) idx.push_back(i);
    return IndexSet(std::move(idx), u.size());
}

double perimeter(const IndexSet& e, const Grid& grid) {
    if (e.universe() != grid.size()) throw InputError("perimeter: set and grid sizes differ");
    double count = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (e.contains(i) != e.contains(i + 1)) count += 1.0;
    return count;
}

bool check_levelset_identity(const IndexSet& e, const Signal& p, double gamma, double tol) {
    const double per = perimeter(e, p.grid());
    double integral = 0.0;
    for (auto i : e.indices()) integral += p[i];
    return std::abs(per + gamma * static_cast<double>(e.size()) - integral) <= tol * (1.0 + per);
}

std::vector<double> hausdorff_levelsets(const Signal& u_n, const Signal& u_exact, const std::vector<double>& thresholds) {
    require_same_grid(u_n, u_exact, "hausdorff_levelsets");
    std::vector<double> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        const IndexSet a = level_set(u_n, t);
        const IndexSet b = level_set(u_exact, t);
        if (a.empty() && b.empty())
            out.push_back(0.0);
        else if (a.empty() || b.empty())
            out.push_back(std::numeric_limits<double>::infinity());
        else
            out.push_back(hausdorff(a, b, u_n.grid()));
    }
    return out;
}

std::vector<double> default_thresholds(const Signal& u, double merge_tol) {
    std::vector<double> v = u.to_vector();
    std::sort(v.begin(), v.end());
    std::vector<double> t;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] - v[i] <= merge_tol * (1.0 + std::abs(v[i + 1]))) continue;
        const double mid = 0.5 * (v[i] + v[i + 1]);
        if (mid > 0.0) t.push_back(mid);
    }
    return t;
}

}  // namespace ivreg
