#include "check.hpp"
#include "oracles.hpp"

#include <ivreg/errors.hpp>
#include <ivreg/random.hpp>
#include <ivreg/signal.hpp>

#include <limits>

using namespace ivreg;

TEST_SUITE_BEGIN("signal");

namespace {

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double lo = -3.0, double hi = 3.0) {
    Eigen::VectorXd v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid(1), InputError);
    CHECK_THROWS_AS(Grid(4, 0.0), InputError);
    CHECK_THROWS_AS(Grid(4, -1.0), InputError);
    const Grid g(5, 0.25);
    CHECK(g.size() == 5);
    CHECK(g.coordinate(4) == 1.0);
}

TEST_CASE("signal rejects bad values") {
    CHECK_THROWS_AS(Signal(Grid(3), {1.0, 2.0}), InputError);
    CHECK_THROWS_AS(Signal::from({1.0, std::numeric_limits<double>::infinity()}), InputError);
    CHECK_THROWS_AS(Signal::from({1.0, std::nan("")}), InputError);
    const auto s = Signal::from({1.0, 2.0, 3.0});
    CHECK(s.grid() == Grid(3));
    CHECK(s.to_vector() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("index set invariants") {
    CHECK_THROWS_AS(IndexSet({2, 1}, 4), InputError);
    CHECK_THROWS_AS(IndexSet({1, 1}, 4), InputError);
    CHECK_THROWS_AS(IndexSet({4}, 4), InputError);
    const IndexSet e({0, 3}, 4);
    CHECK(e.contains(3));
    CHECK_FALSE(e.contains(1));
    CHECK(IndexSet({}, 4).empty());
}

TEST_CASE("tv examples") {
    CHECK(tv(Signal::from({0.0, 0.0, 0.0})) == 0.0);
    CHECK(tv(Signal::from({0.0, 1.0, 1.0, 0.0})) == 2.0);
    CHECK(tv(Signal::from({1.0, 3.0, 2.0})) == 3.0);
}

TEST_CASE("norm examples") {
    CHECK(l1_norm(Signal::from({0.0, 0.0})) == 0.0);
    CHECK(linf_norm(Signal::from({0.0, 0.0})) == 0.0);
    CHECK(l1_norm(Signal::from({1.0, -2.0})) == 3.0);
    CHECK(linf_norm(Signal::from({1.0, -2.0})) == 2.0);
    // a single sample is not a grid; the vector overloads cover it
    CHECK(l1_norm(Eigen::VectorXd::Constant(1, -5.0)) == 5.0);
    CHECK(linf_norm(Eigen::VectorXd::Constant(1, -5.0)) == 5.0);
}

TEST_CASE("tv matches direct summation") {
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const auto v = random_vector(rng, 2 + k);
        CHECK_NEAR(tv(v), oracle::tv(v), 1e-12 * (1.0 + oracle::tv(v)));
    }
}

TEST_CASE("tv is one-homogeneous and translation invariant") {
    Rng rng(11);
    for (int k = 0; k < 30; ++k) {
        const auto v = random_vector(rng, 17);
        const double s = rng.uniform(-4.0, 4.0);
        const double c = rng.uniform(-10.0, 10.0);
        CHECK_NEAR(tv(Eigen::VectorXd(s * v)), std::abs(s) * tv(v), 1e-12 * (1.0 + std::abs(s) * tv(v)));
        CHECK_NEAR(tv(Eigen::VectorXd(v.array() + c)), tv(v), 1e-12 * (1.0 + tv(v)));
    }
}

TEST_CASE("triangle inequality on random signals") {
    Rng rng(12);
    for (int k = 0; k < 50; ++k) {
        const auto a = random_vector(rng, 9);
        const auto b = random_vector(rng, 9);
        const Eigen::VectorXd c = a + b;
        CHECK(tv(c) <= tv(a) + tv(b) + 1e-12);
        CHECK(l1_norm(c) <= l1_norm(a) + l1_norm(b) + 1e-12);
        CHECK(linf_norm(c) <= linf_norm(a) + linf_norm(b) + 1e-12);
    }
}

TEST_CASE("tv vanishes only on constants") {
    CHECK(tv(Signal::constant(Grid(6), 2.5)) == 0.0);
    CHECK(tv(Signal::from({2.5, 2.5, 2.5 + 1e-9})) > 0.0);
}

TEST_CASE("difference operator adjoint") {
    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
        const auto u = random_vector(rng, 12);
        const auto s = random_vector(rng, 11);
        CHECK_NEAR(forward_difference(u).dot(s), u.dot(forward_difference_adjoint(s)), 1e-12);
    }
}

TEST_CASE("grid mismatch is reported") {
    CHECK_THROWS_AS(require_same_grid(Signal::from({1.0, 2.0}), Signal::from({1.0, 2.0, 3.0}), "x"), InputError);
    CHECK_NOTHROW(require_same_grid(Signal::from({1.0, 2.0}), Signal::from({0.0, 0.0}), "x"));
}

TEST_SUITE_END();
