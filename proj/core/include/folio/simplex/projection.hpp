#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace folio::simplex {

/// Weight vectors are laid out [cash, asset_1, ..., asset_N].
inline constexpr double kSimplexTolerance = 1e-9;

/// w = (p * m) / sum(p * m). `mask` has N+1 entries with the cash slot first;
/// masked coordinates come out exactly 0. Throws kDegenerateMask when the
/// surviving mass is below 1e-12.
std::vector<double> mask_and_renormalize(std::span<const double> p,
                                         std::span<const std::uint8_t> mask);

/// Same as above with a tradability row over the N risky names; the cash slot
/// is feasible iff `cash_feasible`.
std::vector<double> mask_and_renormalize_assets(std::span<const double> p,
                                                std::span<const std::uint8_t> asset_mask,
                                                bool cash_feasible = true);

/// Capped-simplex projection with cash as the uncapped slack coordinate.
///
/// The risky block keeps its total mass s = sum_{i>=1} w_i when the caps allow
/// it and is Euclidean-projected onto {0 <= x_i <= caps_i, sum x = s}. When the
/// caps cannot hold s, every name sits at its cap and cash absorbs the excess.
/// Without cash slack the caps must hold s or kFeasibility is thrown.
/// Pass cap 0 for masked names so they stay empty.
std::vector<double> project_capped_simplex(std::span<const double> w,
                                           std::span<const double> caps,
                                           bool cash_slack = true);

/// Euclidean projection of `v` onto {0 <= x_i <= caps_i, sum x = total} by
/// iterative clip-and-redistribute; the worst violator is fixed first.
std::vector<double> project_box_sum(std::span<const double> v, std::span<const double> caps,
                                    double total);

/// True if w is a feasible weight vector under the asset mask: nonnegative,
/// sums to 1 within `tol`, and carries at most `tol` on masked names.
bool is_feasible(std::span<const double> w, std::span<const std::uint8_t> asset_mask,
                 double tol = kSimplexTolerance);

}  // namespace folio::simplex
