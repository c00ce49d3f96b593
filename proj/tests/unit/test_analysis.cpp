#include "check.hpp"

#include <ivreg/analysis.hpp>
#include <ivreg/errors.hpp>
#include <ivreg/experiment.hpp>
#include <ivreg/variational.hpp>

#include <limits>

using namespace ivreg;

TEST_SUITE_BEGIN("analysis");

namespace {

struct Exact {
    Signal u;
    DenseOperator a;
    Signal f;
};

Exact blur_instance(std::size_t n) {
    ExperimentConfig cfg;
    cfg.n = n;
    const auto u = ground_truth(cfg);
    const auto a = forward_operator(cfg);
    return {u, a, apply(a, u)};
}

}  // namespace

TEST_CASE("schedule validation") {
    BoundsSchedule s;
    CHECK_NOTHROW(s.validate());
    CHECK_NEAR(s.eps(3), 0.25 / 8, 1e-15);
    CHECK_NEAR(s.eta(3), 0.5 * 0.25 / 8, 1e-15);
    s.decay = 1.0;
    CHECK_NOTHROW(s.validate());
    s.decay = 0.0;
    CHECK_THROWS_AS(s.validate(), InputError);
    s = {};
    s.c0 = 0.5;
    CHECK_THROWS_AS(s.validate(), InputError);
    s = {};
    s.d0 = -1.0;
    CHECK_THROWS_AS(s.validate(), InputError);
    s = {};
    s.steps = 0;
    CHECK_THROWS_AS(s.validate(), InputError);
}

TEST_CASE("unit band factor gives exact widths") {
    const auto e = blur_instance(32);
    BoundsSchedule s;
    s.c0 = 1.0;
    const auto seq = generate_bounds_sequence(s, e.f, e.a, 3);
    REQUIRE(seq.size() == 8);
    for (std::size_t k = 0; k < seq.size(); ++k) {
        const Eigen::VectorXd up = seq[k].data.upper().values() - e.f.values();
        const Eigen::VectorXd lo = e.f.values() - seq[k].data.lower().values();
        CHECK((up.array() - s.eps(k)).abs().maxCoeff() <= 1e-15);
        CHECK((lo.array() - s.eps(k)).abs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("zero operator factor keeps the exact operator") {
    const auto e = blur_instance(32);
    BoundsSchedule s;
    s.d0 = 0.0;
    for (const auto& step : generate_bounds_sequence(s, e.f, e.a, 5)) {
        CHECK(step.op.lower().matrix() == e.a.matrix());
        CHECK(step.op.upper().matrix() == e.a.matrix());
    }
}

TEST_CASE("bounds are nested and contain the exact data") {
    const auto e = blur_instance(48);
    const BoundsSchedule s;
    const auto seq = generate_bounds_sequence(s, e.f, e.a, 7);
    for (std::size_t k = 0; k < seq.size(); ++k) {
        CHECK(seq[k].data.contains(e.f));
        CHECK(seq[k].op.contains(e.a));
        CHECK(seq[k].op.width() <= 2.0 * s.eta(0) + 1e-15);
        if (k == 0) continue;
        const auto& a = seq[k - 1];
        const auto& b = seq[k];
        CHECK((b.data.upper().values().array() <= a.data.upper().values().array()).all());
        CHECK((b.data.lower().values().array() >= a.data.lower().values().array()).all());
        CHECK((b.op.upper().matrix().array() <= a.op.upper().matrix().array()).all());
        CHECK((b.op.lower().matrix().array() >= a.op.lower().matrix().array()).all());
    }
    const auto single = generate_bounds(s, e.f, e.a, 4, 7);
    CHECK(single.data.upper().values() == seq[4].data.upper().values());
    CHECK(single.op.lower().matrix() == seq[4].op.lower().matrix());
    CHECK_THROWS_AS(generate_bounds(s, e.f, e.a, 8, 7), InputError);
}

TEST_CASE("log-log slope") {
    CHECK_NEAR(*loglog_slope({1.0, 0.5, 0.25}, {2.0, 1.0, 0.5}), 1.0, 1e-12);
    CHECK_NEAR(*loglog_slope({1.0, 0.1, 0.01}, {1.0, 0.01, 1e-4}), 2.0, 1e-12);
    CHECK_FALSE(loglog_slope({0.5, 0.5, 0.5}, {1.0, 2.0, 3.0}).has_value());
    CHECK_FALSE(loglog_slope({1.0, 0.5}, {1.0, 0.0}).has_value());
    // non-positive distances are skipped
    CHECK_NEAR(*loglog_slope({1.0, 0.5, 0.25, 0.125}, {1.0, 0.25, 0.0, 1.0 / 64}), 2.0, 1e-12);
}

TEST_CASE("level sets and perimeter") {
    const auto u = Signal::from({0.0, 2.0, 2.0, 0.0});
    const auto e = level_set(u, 1.0);
    CHECK(e.indices() == std::vector<std::size_t>{1, 2});
    CHECK(perimeter(e, u.grid()) == 2.0);
    CHECK(level_set(u, 3.0).empty());
    CHECK(perimeter(level_set(u, 3.0), u.grid()) == 0.0);
    CHECK(perimeter(IndexSet({0, 1, 2, 3}, 4), u.grid()) == 0.0);
    CHECK_THROWS_AS(level_set(u, 0.0), InputError);
}

TEST_CASE("coarea formula") {
    const auto u = Signal::from({0.5, 2.0, 1.0, 3.5, 3.5, 0.25, 1.75});
    const double dt = 1e-4;
    double total = 0.0;
    for (double t = dt / 2; t < 4.0; t += dt) total += perimeter(level_set(u, t), u.grid()) * dt;
    CHECK_NEAR(total, tv(u), 20 * dt);
}

TEST_CASE("level-set identity") {
    const Grid g(6);
    CHECK(check_levelset_identity(IndexSet({}, 6), Signal::zeros(g), 0.3, 1e-9));

    // a flat denoising solution: u_n on the lower bound, no jumps
    const Regularizer j(0.5);
    const auto id = IntervalOperator::exact(DenseOperator::identity(6));
    const IntervalData data(Signal::constant(g, 1.0), Signal::constant(g, 2.0));
    const auto r = solve_primal(j, id, data);
    REQUIRE(r.optimal());
    for (double t : {0.25, 0.5, 0.99}) {
        const auto e = level_set(r.u, t);
        CHECK(e.size() == 6);
        CHECK(check_levelset_identity(e, r.certificate.p, 0.5, 1e-9));
    }

    const auto p = Signal::from({-1.0, 2.0, -1.0});
    const IndexSet mid({1}, 3);
    CHECK(check_levelset_identity(mid, p, 0.0, 1e-9));
    const auto bumped = p.with_values(Eigen::VectorXd(p.values().array() + 10 * 1e-9 * 3));
    CHECK_FALSE(check_levelset_identity(mid, bumped, 0.0, 1e-9));
}

TEST_CASE("level-set identity along solved plateaus") {
    const auto e = blur_instance(32);
    const Regularizer j(1e-4);
    BoundsSchedule s;
    const auto step = generate_bounds(s, e.f, e.a, 6, 2);
    const auto r = solve_primal(j, step.op, step.data);
    REQUIRE(r.optimal());
    for (double t : default_thresholds(r.u)) {
        INFO("t " << t);
        CHECK(check_levelset_identity(level_set(r.u, t), r.certificate.p, j.gamma(), 1e-6));
    }
}

TEST_CASE("hausdorff between level sets") {
    const Grid g(10, 0.5);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(10), b = Eigen::VectorXd::Zero(10);
    a.segment(2, 3).setConstant(2.0);
    b.segment(5, 3).setConstant(2.0);
    const Signal ua(g, a), ub(g, b);
    const auto same = hausdorff_levelsets(ua, ua, {0.5, 1.0, 3.0});
    CHECK(same == std::vector<double>{0.0, 0.0, 0.0});
    const auto shifted = hausdorff_levelsets(ub, ua, {1.0});
    CHECK(shifted[0] == 3 * 0.5);
    const auto mismatch = hausdorff_levelsets(Signal::zeros(g), ua, {1.0});
    CHECK(mismatch[0] == std::numeric_limits<double>::infinity());
}

TEST_CASE("default thresholds separate distinct levels") {
    const auto u = Signal::from({0.0, 1.0, 1.0 + 1e-15, 3.0, 3.0, 1.0});
    const auto t = default_thresholds(u);
    REQUIRE(t.size() == 2);
    CHECK_NEAR(t[0], 0.5, 1e-15);
    CHECK_NEAR(t[1], 2.0, 1e-12);
    CHECK(default_thresholds(Signal::constant(Grid(4), 2.0)).empty());
}

TEST_CASE("rate experiment for denoising") {
    ExperimentConfig cfg;
    cfg.n = 32;
    const auto u = ground_truth(cfg);
    const auto a = DenseOperator::identity(32);
    BoundsSchedule s;
    s.d0 = 0.0;
    const Regularizer j(0.5);
    const auto ex = rate_experiment(j, s, u, a, u, 1, {0.5, 2.0});
    REQUIRE(ex.source_condition());
    REQUIRE(ex.table.rows.size() == 8);
    REQUIRE(ex.table.slope.has_value());
    CHECK(*ex.table.slope >= 0.8);
    for (std::size_t k = 1; k < 8; ++k) CHECK(ex.table.rows[k].eps < ex.table.rows[k - 1].eps);
    for (const auto& row : ex.table.rows) {
        CHECK(row.bregman >= -1e-9);
        CHECK(row.objective <= j.value(u) + 1e-9);
        CHECK(row.hausdorff.size() == 2);
    }

    const auto csv = ex.table.to_csv();
    CHECK(csv.rfind("n,eps,bregman,objective,hausdorff_t1,hausdorff_t2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("constant schedule has no slope") {
    ExperimentConfig cfg;
    cfg.n = 24;
    const auto u = ground_truth(cfg);
    BoundsSchedule s;
    s.decay = 1.0;
    s.d0 = 0.0;
    s.steps = 4;
    const auto ex = rate_experiment(Regularizer(0.5), s, u, DenseOperator::identity(24), u, 1);
    REQUIRE(ex.source_condition());
    CHECK_FALSE(ex.table.slope.has_value());
    for (const auto& row : ex.table.rows) CHECK(std::isfinite(row.bregman));
}

TEST_SUITE_END();
