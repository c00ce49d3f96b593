#include "ivreg/metrics.hpp"

#include "ivreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ivreg {

double psnr(const Signal& u, const Signal& ref, std::optional<double> peak) {
    require_same_grid(u, ref, "psnr");
    const double p = peak.value_or(ref.values().maxCoeff());
    if (!(p > 0.0)) {
        throw InputError("psnr: peak must be positive");
    }
    const double mse = (u.values() - ref.values()).squaredNorm() / static_cast<double>(u.size());
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(p * p / mse);
}

double ssim_1d(const Signal& u, const Signal& ref, std::size_t window,
               std::optional<double> dynamic_range) {
    require_same_grid(u, ref, "ssim_1d");
    const std::size_t n = u.size();
    if (window == 0 || window > n) {
        throw InputError("ssim_1d: window must lie in [1, n]");
    }
    double range = 0.0;
    if (dynamic_range) {
        range = *dynamic_range;
    } else {
        range = ref.values().maxCoeff() - ref.values().minCoeff();
        if (range <= 0.0) range = 1.0;
    }
    if (!(range > 0.0)) {
        throw InputError("ssim_1d: dynamic range must be positive");
    }
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);
    const auto w = static_cast<Eigen::Index>(window);
    const double inv_w = 1.0 / static_cast<double>(window);

    double total = 0.0;
    const std::size_t count = n - window + 1;
    for (std::size_t start = 0; start < count; ++start) {
        const auto x = u.values().segment(static_cast<Eigen::Index>(start), w);
        const auto y = ref.values().segment(static_cast<Eigen::Index>(start), w);
        const double mx = x.sum() * inv_w;
        const double my = y.sum() * inv_w;
        const double vx = (x.array() - mx).square().sum() * inv_w;
        const double vy = (y.array() - my).square().sum() * inv_w;
        const double cxy = ((x.array() - mx) * (y.array() - my)).sum() * inv_w;
        total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(count);
}

namespace {

// max over a of min over b of |a - b|, on sorted inputs.
std::size_t directed_index_distance(const std::vector<std::size_t>& a,
                                    const std::vector<std::size_t>& b) {
    std::size_t worst = 0;
    for (std::size_t x : a) {
        auto it = std::lower_bound(b.begin(), b.end(), x);
        std::size_t best = std::numeric_limits<std::size_t>::max();
        if (it != b.end()) best = *it - x;
        if (it != b.begin()) best = std::min(best, x - *std::prev(it));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double hausdorff(const IndexSet& a, const IndexSet& b, const Grid& grid) {
    if (a.empty() || b.empty()) {
        throw EmptySetError("hausdorff: distance to an empty set is undefined");
    }
    const std::size_t d = std::max(directed_index_distance(a.indices(), b.indices()),
                                   directed_index_distance(b.indices(), a.indices()));
    return grid.spacing() * static_cast<double>(d);
}

}  // namespace ivreg
