#include "check.hpp"

#include <ivreg/errors.hpp>
#include <ivreg/metrics.hpp>
#include <ivreg/random.hpp>

#include <limits>

using namespace ivreg;

TEST_SUITE_BEGIN("metrics");

namespace {

double brute_hausdorff(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b, double h) {
    auto directed = [](const auto& x, const auto& y) {
        double worst = 0.0;
        for (auto i : x) {
            double best = std::numeric_limits<double>::infinity();
            for (auto j : y) best = std::min(best, std::abs(static_cast<double>(i) - static_cast<double>(j)));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return h * std::max(directed(a, b), directed(b, a));
}

}  // namespace

TEST_CASE("psnr of identical signals is infinite") {
    const auto u = Signal::from({1.0, 2.0, 3.0});
    CHECK(psnr(u, u) == std::numeric_limits<double>::infinity());
}

TEST_CASE("psnr against hand computation") {
    const auto ref = Signal::from({0.0, 2.0, 4.0, 2.0});
    const auto u = Signal::from({1.0, 2.0, 3.0, 2.0});
    // mse = (1 + 0 + 1 + 0) / 4 = 0.5, peak = 4
    CHECK_NEAR(psnr(u, ref), 10.0 * std::log10(16.0 / 0.5), 1e-12);
    CHECK_NEAR(psnr(u, ref, 2.0), 10.0 * std::log10(4.0 / 0.5), 1e-12);
    CHECK_THROWS_AS(psnr(u, ref, 0.0), InputError);
    CHECK_THROWS_AS(psnr(u, Signal::from({1.0, 2.0})), InputError);
}

TEST_CASE("ssim bounds and identity") {
    Rng rng(4);
    Eigen::VectorXd a(40), b(40);
    for (auto& v : a) v = rng.uniform(0.0, 3.0);
    for (auto& v : b) v = rng.uniform(0.0, 3.0);
    const Signal sa(Grid(40), a), sb(Grid(40), b);
    CHECK_NEAR(ssim_1d(sa, sa), 1.0, 1e-12);
    const double s = ssim_1d(sb, sa);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    CHECK(s < 1.0);
    CHECK_THROWS_AS(ssim_1d(sa, sa, 0), InputError);
    CHECK_THROWS_AS(ssim_1d(sa, sa, 41), InputError);
}

TEST_CASE("ssim single window against direct formula") {
    const auto ref = Signal::from({1.0, 3.0, 2.0, 5.0});
    const auto u = Signal::from({1.5, 2.5, 2.0, 4.0});
    const double L = 4.0, c1 = (0.01 * L) * (0.01 * L), c2 = (0.03 * L) * (0.03 * L);
    const double mx = (1.5 + 2.5 + 2.0 + 4.0) / 4, my = (1.0 + 3.0 + 2.0 + 5.0) / 4;
    double vx = 0, vy = 0, cxy = 0;
    const double xs[] = {1.5, 2.5, 2.0, 4.0}, ys[] = {1.0, 3.0, 2.0, 5.0};
    for (int i = 0; i < 4; ++i) {
        vx += (xs[i] - mx) * (xs[i] - mx) / 4;
        vy += (ys[i] - my) * (ys[i] - my) / 4;
        cxy += (xs[i] - mx) * (ys[i] - my) / 4;
    }
    const double expect = (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    CHECK_NEAR(ssim_1d(u, ref, 4), expect, 1e-12);
}

TEST_CASE("hausdorff examples") {
    const Grid g(8);
    CHECK(hausdorff(IndexSet({1, 2}, 8), IndexSet({1, 2}, 8), g) == 0.0);
    CHECK(hausdorff(IndexSet({1}, 8), IndexSet({3}, 8), g) == 2.0);
    CHECK(hausdorff(IndexSet({0, 5}, 8), IndexSet({1}, 8), g) == 4.0);
    CHECK(hausdorff(IndexSet({1}, 8), IndexSet({3}, 8), Grid(8, 0.5)) == 1.0);
    CHECK_THROWS_AS(hausdorff(IndexSet({}, 8), IndexSet({3}, 8), g), EmptySetError);
}

TEST_CASE("hausdorff matches pairwise enumeration") {
    Rng rng(9);
    const std::size_t n = 30;
    for (int k = 0; k < 100; ++k) {
        std::vector<std::size_t> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.uniform(0, 1) < 0.2) a.push_back(i);
            if (rng.uniform(0, 1) < 0.2) b.push_back(i);
        }
        if (a.empty() || b.empty()) continue;
        const double d = hausdorff(IndexSet(a, n), IndexSet(b, n), Grid(n, 0.1));
        CHECK_NEAR(d, brute_hausdorff(a, b, 0.1), 1e-12);
        CHECK((d == 0.0) == (a == b));
    }
}

TEST_SUITE_END();
