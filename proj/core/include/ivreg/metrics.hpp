#pragma once

#include "ivreg/signal.hpp"

#include <cstddef>
#include <optional>

namespace ivreg {

/// Peak signal-to-noise ratio in dB. Returns +infinity when the signals are
/// identical. `peak` defaults to the maximum of `ref`.
double psnr(const Signal& u, const Signal& ref, std::optional<double> peak = std::nullopt);

inline constexpr std::size_t default_ssim_window = 8;

/// Mean structural similarity over all length-`window` sliding windows, with
/// C1 = (0.01 L)^2 and C2 = (0.03 L)^2. `dynamic_range` (L) defaults to
/// max(ref) - min(ref), or 1 for a constant reference.
double ssim_1d(const Signal& u, const Signal& ref, std::size_t window = default_ssim_window,
               std::optional<double> dynamic_range = std::nullopt);

/// Symmetric Hausdorff distance between two index sets, in grid units
/// (spacing times index distance). Throws EmptySetError if either is empty.
double hausdorff(const IndexSet& a, const IndexSet& b, const Grid& grid);

}  // namespace ivreg
