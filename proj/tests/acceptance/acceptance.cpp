// Acceptance run: one PASS/FAIL line per criterion.

#include "oracles.hpp"

#include <ivreg/analysis.hpp>
#include <ivreg/baselines.hpp>
#include <ivreg/debias.hpp>
#include <ivreg/experiment.hpp>
#include <ivreg/lp.hpp>
#include <ivreg/lp_builder.hpp>
#include <ivreg/metrics.hpp>
#include <ivreg/variational.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace ivreg;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::vector<std::uint64_t> seeds(std::uint64_t first, std::uint64_t count) {
    std::vector<std::uint64_t> s;
    for (std::uint64_t k = 0; k < count; ++k) s.push_back(first + k);
    return s;
}

ExperimentConfig family(std::size_t n) {
    ExperimentConfig c;
    c.n = n;
    return c;
}

ExperimentConfig denoising(std::size_t n) {
    ExperimentConfig c;
    c.n = n;
    c.forward = ForwardKind::identity;
    c.operator_noise = 0.0;
    return c;
}

std::vector<std::size_t> exact_jumps(const Signal& u) {
    std::vector<std::size_t> j;
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        if (u[i + 1] != u[i]) j.push_back(i);
    return j;
}

// ---------------------------------------------------------------------------

Verdict lp_oracle_equivalence() {
    const auto t0 = Clock::now();
    int mismatched = 0, optimal = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto p = oracle::random_small_lp(seed);
        const auto a = lp::solve_lp(p);
        const auto o = lp::vertex_oracle(p);
        if (a.status != o.status) {
            ++mismatched;
            continue;
        }
        if (o.optimal()) {
            ++optimal;
            worst = std::max(worst, std::abs(a.objective - o.objective));
        }
    }
    const double t = seconds_since(t0);
    return {mismatched == 0 && worst <= 1e-7 && t < 10.0,
            "200 LPs, status mismatches " + std::to_string(mismatched) + ", optimal " + std::to_string(optimal) +
                ", max |obj diff| " + fmt(worst) + ", " + fmt(t) + " s"};
}

Verdict duality_complementarity() {
    const auto t0 = Clock::now();
    const auto cfg = family(32);
    const Regularizer j(cfg.gamma);
    int bad = 0;
    double gap = 0.0, cmu = 0.0, clam = 0.0;
    for (auto seed : seeds(1, 50)) {
        const auto inst = synthesize(cfg, seed);
        const auto rep = solve_primal(j, inst.op, inst.data);
        if (!rep.optimal()) {
            ++bad;
            continue;
        }
        gap = std::max(gap, rep.duality_gap);
        cmu = std::max(cmu, rep.complementarity_mu);
        clam = std::max(clam, rep.complementarity_lambda);
        const bool zero = in_subdiff_zero(j, rep.certificate.p).member;
        const bool at = in_subdiff_at(j, rep.certificate.p, rep.u);
        if (!zero || !at || rep.duality_gap > 1e-7 || rep.complementarity_mu > 1e-7 ||
            rep.complementarity_lambda > 1e-7)
            ++bad;
    }
    const double t = seconds_since(t0);
    return {bad == 0 && t < 60.0, "50 instances n=32, failing " + std::to_string(bad) + ", max gap " + fmt(gap) +
                                      ", max compl mu " + fmt(cmu) + ", lambda " + fmt(clam) + ", " + fmt(t) + " s"};
}

Verdict subdifferential_invariants() {
    Rng rng(77);
    const std::size_t n = 64;
    Eigen::VectorXd u(n);
    for (auto& v : u) v = rng.uniform(-2.0, 5.0);
    const Regularizer j4(1e-4);
    double homog = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double s = rng.uniform(-10.0, 10.0);
        const double lhs = j4.value(Eigen::VectorXd(s * u));
        const double rhs = std::abs(s) * j4.value(u);
        homog = std::max(homog, std::abs(lhs - rhs) / (1.0 + rhs));
    }

    const Regularizer j0(0.0);
    double sum_p = 0.0;
    int solved = 0;
    for (auto seed : seeds(1, 10)) {
        const auto inst = synthesize(family(32), seed);
        const auto rep = solve_primal(j0, inst.op, inst.data);
        if (!rep.optimal()) continue;
        ++solved;
        sum_p = std::max(sum_p, std::abs(rep.certificate.p.values().sum()));
    }

    int rejected = 0, oracle_rejected = 0;
    const Grid g(n);
    for (int k = 0; k < 200; ++k) {
        Eigen::VectorXd p(n);
        for (auto& v : p) v = rng.uniform(-1e-4, 1e-4);
        if (!in_subdiff_zero(j4, Signal(g, p)).member) ++rejected;
        if (!oracle::in_subdiff_zero(p, 1e-4, 1e-12)) ++oracle_rejected;
    }
    return {homog <= 1e-12 && solved == 10 && sum_p <= 1e-6 && rejected == 0 && oracle_rejected == 0,
            "homogeneity err " + fmt(homog) + ", gamma=0 max |sum p| " + fmt(sum_p) + " over " +
                std::to_string(solved) + " solves, |p|<=gamma rejected " + std::to_string(rejected) + " (oracle " +
                std::to_string(oracle_rejected) + ")"};
}

Verdict levelset_identity() {
    const auto cfg = family(64);
    const Regularizer j(1e-4);
    int checked = 0, failed = 0, unsolved = 0;
    for (auto seed : seeds(1, 10)) {
        const auto inst = synthesize(cfg, seed);
        const auto rep = solve_primal(j, inst.op, inst.data);
        if (!rep.optimal()) {
            ++unsolved;
            continue;
        }
        std::vector<double> ts = default_thresholds(rep.u);
        const double top = rep.u.values().maxCoeff();
        for (int k = 1; k <= 40; ++k) ts.push_back(top * k / 41.0);
        for (double t : ts) {
            if (!(t > 0.0)) continue;
            ++checked;
            if (!check_levelset_identity(level_set(rep.u, t), rep.certificate.p, j.gamma(), 1e-6)) ++failed;
        }
    }
    return {failed == 0 && unsolved == 0 && checked > 0,
            std::to_string(checked) + " thresholds over 10 solves at n=64, violations " + std::to_string(failed) +
                ", unsolved " + std::to_string(unsolved)};
}

struct ScheduleRun {
    std::string name;
    RateExperiment exp;
    double h;
};

std::vector<ScheduleRun>& schedule_runs() {
    static std::vector<ScheduleRun> runs = [] {
        std::vector<ScheduleRun> r;
        BoundsSchedule s;  // eps0 0.25, decay 0.5, d0 0.5, 8 steps
        for (const auto& [name, cfg] : {std::pair{"denoising", denoising(64)}, std::pair{"deblurring", family(64)}}) {
            const Signal u = ground_truth(cfg);
            const DenseOperator a = forward_operator(cfg);
            r.push_back({name, rate_experiment(Regularizer(1e-4), s, apply(a, u), a, u, 1), cfg.spacing()});
        }
        return r;
    }();
    return runs;
}

Verdict convergence_rate() {
    const auto t0 = Clock::now();
    auto& runs = schedule_runs();
    bool pass = true;
    std::string detail;
    for (const auto& run : runs) {
        const auto& tab = run.exp.table;
        bool ok = run.exp.source_condition() && tab.rows.size() == 8 && tab.slope && *tab.slope >= 0.8;
        // running maximum C_k = max_{n<=k} D_n / eps_n; growth over the last 4 steps
        double max_ratio = 0.0, c_before = 0.0;
        for (std::size_t k = 0; k < tab.rows.size(); ++k) {
            if (k + 4 == tab.rows.size()) c_before = max_ratio;
            max_ratio = std::max(max_ratio, tab.rows[k].bregman / tab.rows[k].eps);
        }
        const double spread = c_before > 0.0 ? max_ratio / c_before : std::numeric_limits<double>::infinity();
        ok = ok && std::isfinite(max_ratio) && std::isfinite(spread) && spread <= 5.0;
        pass = pass && ok;
        detail += run.name + ": slope " + (tab.slope ? fmt(*tab.slope) : std::string("undefined")) +
                  ", max D/eps " + fmt(max_ratio) + ", growth of max D/eps over last 4 steps " + fmt(spread) + "; ";
    }
    const double t = seconds_since(t0);
    return {pass && t < 120.0, detail + fmt(t) + " s"};
}

Verdict levelset_hausdorff() {
    auto& runs = schedule_runs();
    bool pass = true;
    std::string detail;
    for (const auto& run : runs) {
        const auto& tab = run.exp.table;
        if (tab.rows.empty()) {
            pass = false;
            detail += run.name + ": no table; ";
            continue;
        }
        double worst = 0.0;
        for (double d : tab.rows.back().hausdorff) worst = std::max(worst, d);
        pass = pass && worst <= run.h * (1.0 + 1e-9);
        detail += run.name + ": final max Hausdorff " + fmt(worst / run.h) + " samples; ";
    }
    // gamma = 0 recorded only
    for (const auto& [name, cfg] : {std::pair{"denoising", denoising(64)}, std::pair{"deblurring", family(64)}}) {
        const Signal u = ground_truth(cfg);
        const DenseOperator a = forward_operator(cfg);
        try {
            const auto e = rate_experiment(Regularizer(0.0), BoundsSchedule{}, apply(a, u), a, u, 1);
            double worst = 0.0;
            if (!e.table.rows.empty())
                for (double d : e.table.rows.back().hausdorff) worst = std::max(worst, d);
            detail += std::string("gamma=0 ") + name + " (recorded): " + fmt(worst / cfg.spacing()) + " samples; ";
        } catch (const std::exception& ex) {
            detail += std::string("gamma=0 ") + name + " (recorded): " + ex.what() + "; ";
        }
    }
    return {pass, detail};
}

// Instances shared by the reconstruction, error-bar and baseline criteria.
struct Reconstruction {
    Instance inst;
    PrimalSolveReport interval;
    PrimalSolveReport naive;
    std::optional<ModelManifoldSpec> manifold;
    std::optional<DebiasResult> debiased;
    std::optional<DebiasResult> debiased_noisy;
    JumpDetection jumps;
};

std::vector<Reconstruction>& reconstructions() {
    static std::vector<Reconstruction> all = [] {
        std::vector<Reconstruction> r;
        const auto cfg = family(128);
        const Regularizer j(cfg.gamma);
        for (auto seed : seeds(1, 10)) {
            auto inst = synthesize(cfg, seed);
            auto rep = solve_primal(j, inst.op, inst.data);
            auto naive = naive_solve(j, inst.a_noisy, inst.data);
            Reconstruction rec{std::move(inst), std::move(rep), std::move(naive), std::nullopt, std::nullopt, std::nullopt, {}};
            if (rec.interval.optimal()) {
                rec.manifold = manifold_from_solve(rec.interval, j, rec.inst.op, rec.inst.data, cfg.eps, cfg.c_cap);
                rec.debiased = debias(*rec.manifold);
                rec.debiased_noisy = debias(*rec.manifold, rec.inst.a_noisy, rec.inst.f_noisy);
                rec.jumps = detect_jumps(rec.interval.u, rec.interval.certificate.p, cfg.gamma, cfg.nu);
            }
            r.push_back(std::move(rec));
        }
        return r;
    }();
    return all;
}

Verdict qualitative_reproduction() {
    const auto t0 = Clock::now();
    auto& recs = reconstructions();
    int a = 0, b = 0, c = 0, d = 0, c_noisy = 0;
    std::ostringstream rows;
    for (const auto& r : recs) {
        const Signal& truth = r.inst.u_exact;
        const double pi = r.interval.optimal() ? psnr(r.interval.u, truth) : -1e9;
        const double pn = r.naive.optimal() ? psnr(r.naive.u, truth) : std::nan("");
        const double ratio = r.naive.optimal() ? tv(r.naive.u) / tv(truth) : std::nan("");
        const double pd = r.debiased ? psnr(r.debiased->u, truth) : -1e9;
        if (r.naive.optimal() && pi >= pn + 2.0) ++a;
        if (r.naive.optimal() && ratio >= 3.0) ++b;
        if (r.debiased && r.debiased->gap <= 1e-5 && pd >= pi) ++c;
        if (r.debiased_noisy && r.debiased_noisy->gap <= 1e-5 && psnr(r.debiased_noisy->u, truth) >= pi) ++c_noisy;

        std::size_t worst = 0;
        bool matched = r.jumps.status == lp::Status::optimal;
        if (matched) {
            const auto& found = r.jumps.jumps.indices();
            for (auto e : exact_jumps(truth)) {
                std::size_t best = truth.size();
                for (auto f : found) best = std::min(best, f > e ? f - e : e - f);
                worst = std::max(worst, best);
            }
            matched = worst <= 2;
        }
        if (matched) ++d;
        rows << "    seed " << r.inst.seed << ": interval " << fmt(pi) << " dB, naive " << fmt(pn) << " dB, tv ratio "
             << fmt(ratio) << ", debiased " << fmt(pd) << " dB (gap " << fmt(r.debiased ? r.debiased->gap : NAN)
             << "), jumps found " << r.jumps.jumps.size() << ", worst jump offset " << worst << "\n";
    }
    const double t = seconds_since(t0);
    std::printf("%s", rows.str().c_str());
    const bool pass = a >= 8 && b >= 8 && c == 10 && d >= 8 && t < 600.0;
    return {pass, "(a) " + std::to_string(a) + "/10, (b) " + std::to_string(b) + "/10, (c) " + std::to_string(c) +
                      "/10, (d) " + std::to_string(d) + "/10; (c) with the noisy operator (recorded): " +
                      std::to_string(c_noisy) + "/10; " + fmt(t) + " s"};
}

Verdict error_bar_criterion() {
    auto& recs = reconstructions();
    auto half = family(128);
    half.operator_noise = 0.025;
    const Regularizer j(half.gamma);
    int contained = 0, nested = 0;
    double widen = 0.0;
    for (const auto& r : recs) {
        if (!r.manifold || r.jumps.status != lp::Status::optimal) continue;
        const auto regions = regions_from_jumps(r.jumps.jumps, r.inst.u_exact.size());
        const auto bars = error_bars(*r.manifold, regions);
        bool in = true;
        for (const auto& bar : bars.bars) {
            const double exact = region_mean(r.inst.u_exact, bar.region);
            const double tol = 1e-9 * (1.0 + std::abs(exact));
            in = in && bar.ok() && bar.lower <= exact + tol && exact <= bar.upper + tol;
        }
        if (in) ++contained;

        const auto inst2 = synthesize(half, r.inst.seed);
        const auto rep2 = solve_primal(j, inst2.op, inst2.data);
        if (!rep2.optimal()) continue;
        const auto m2 = manifold_from_solve(rep2, j, inst2.op, inst2.data, half.eps, half.c_cap);
        const auto bars2 = error_bars(m2, regions);
        bool ok = true;
        for (std::size_t k = 0; k < bars.bars.size(); ++k) {
            const auto& wide = bars.bars[k];
            const auto& narrow = bars2.bars[k];
            const double lo = wide.lower - narrow.lower;
            const double hi = narrow.upper - wide.upper;
            widen = std::max({widen, lo, hi});
            ok = ok && narrow.ok() && lo <= 1e-6 * (1.0 + std::abs(wide.lower)) &&
                 hi <= 1e-6 * (1.0 + std::abs(wide.upper));
        }
        if (ok) ++nested;
    }
    return {contained == 10 && nested == 10,
            "exact means inside bars " + std::to_string(contained) + "/10, bars not widened at 2.5% " +
                std::to_string(nested) + "/10 (largest widening " + fmt(widen) + ")"};
}

struct StructureCount {
    int clean_seeds = 0;
    std::size_t vertices = 0;
    std::size_t offending = 0;
};

StructureCount vertex_jump_structure(const ExperimentConfig& cfg) {
    const Regularizer j(cfg.gamma);
    int pass_seeds = 0;
    std::size_t vertices = 0, offending = 0;
    for (auto seed : seeds(1, 10)) {
        const auto inst = synthesize(cfg, seed);
        const auto rep = solve_primal(j, inst.op, inst.data);
        if (!rep.optimal()) continue;
        const auto ref = detect_jumps(rep.u, rep.certificate.p, cfg.gamma, cfg.nu);
        if (ref.status != lp::Status::optimal) continue;
        const auto m = manifold_from_solve(rep, j, inst.op, inst.data, cfg.eps, cfg.c_cap);
        const auto regions = regions_from_jumps(ref.jumps, rep.u.size());
        bool ok = true;
        for (const auto& v : error_bar_vertices(m, regions)) {
            ++vertices;
            const auto det = detect_jumps(v, rep.certificate.p, cfg.gamma, cfg.nu);
            bool inside = det.status == lp::Status::optimal;
            for (auto s : det.jumps.indices()) inside = inside && ref.jumps.contains(s);
            if (!inside) {
                ++offending;
                ok = false;
            }
        }
        if (ok) ++pass_seeds;
    }
    return {pass_seeds, vertices, offending};
}

Verdict manifold_structure() {
    auto cfg = denoising(128);
    const auto c = vertex_jump_structure(cfg);
    cfg.eps = 0.0;
    const auto zero = vertex_jump_structure(cfg);
    return {c.clean_seeds == 10,
            std::to_string(c.clean_seeds) + "/10 seeds clean, " + std::to_string(c.offending) + " of " +
                std::to_string(c.vertices) + " vertices with jumps outside the reference set; eps=0 (recorded): " +
                std::to_string(zero.clean_seeds) + "/10 clean, " + std::to_string(zero.offending) + " offending"};
}

Verdict baselines_criterion() {
    auto cfg = family(128);
    cfg.operator_noise = 0.025;
    const Regularizer j(cfg.gamma);
    int contrast = 0, ordering = 0;
    std::ostringstream rows;
    for (auto seed : seeds(1, 10)) {
        const auto inst = synthesize(cfg, seed);
        MorozovConfig mc;
        mc.c_factor = cfg.c_factor;
        mc.delta = inst.delta;
        mc.h_op = inst.d;
        double pm = std::nan(""), mx = std::nan("");
        try {
            const auto mm = morozov(j, inst.a_noisy, inst.f_noisy, mc, true);
            pm = psnr(mm.solution.u, inst.u_exact);
            mx = mm.solution.u.values().maxCoeff();
            if (mx < inst.u_exact.values().maxCoeff()) ++contrast;
        } catch (const std::exception&) {
        }
        const auto rep = solve_primal(j, inst.op, inst.data);
        const double pi = rep.optimal() ? psnr(rep.u, inst.u_exact) : std::nan("");
        if (rep.optimal() && std::isfinite(pm) && pi >= pm) ++ordering;
        rows << "    seed " << seed << ": modified Morozov " << fmt(pm) << " dB (max " << fmt(mx) << "), interval "
             << fmt(pi) << " dB\n";
    }
    std::printf("%s", rows.str().c_str());
    return {contrast >= 8 && ordering >= 8, "contrast loss " + std::to_string(contrast) +
                                                "/10, interval PSNR >= modified Morozov " + std::to_string(ordering) +
                                                "/10"};
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
        {1, lp_oracle_equivalence},    {2, duality_complementarity}, {3, subdifferential_invariants},
        {4, levelset_identity},        {5, convergence_rate},        {6, levelset_hausdorff},
        {7, qualitative_reproduction}, {8, error_bar_criterion},     {9, manifold_structure},
        {10, baselines_criterion}};
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d: %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
