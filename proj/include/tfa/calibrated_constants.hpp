#pragma once

#include <cmath>

// Constants measured once on the reference grids and frozen here. Tests
// compare against 1.5x these values.
namespace tfa::calibrated {

/// max_j ∫|φ_{s_j}|² (1 + dist(x, I_s)/|I_s|)^5 dx over unit-normalised tiles.
inline constexpr double kWavePacketDecay = 5.31;

/// Worst observed ‖ℳf‖_{r'}/‖f‖_{r'} (a single spike is the extremiser among
/// the families tried). Outside the measured exponents falls back to 2r'/(r'-1).
inline double maximal_bound(double r_prime) {
  if (std::abs(r_prime - 4.0 / 3.0) < 1e-12) return 3.12;
  if (std::abs(r_prime - 1.5) < 1e-12) return 2.25;
  return 2.0 * r_prime / (r_prime - 1.0);
}

}  // namespace tfa::calibrated

namespace tfa::calibrated {

/// |⟨h,φ_{s₃}⟩| / (|I_s|^{1/2} · (avg_{I_s} ℳ(h χ̃_{I_s}^M)^{r'})^{1/r'}), single tile.
inline constexpr double kSingleTileColumn = 0.74;
/// Column/row estimate lhs/rhs, 100 random columns of 1–64 tiles, r = 4.
inline constexpr double kColumnEstimate = 0.51;
/// Σ|⟨g,φ_{s₂}⟩|² against ∫|g|²χ̃^{10}, normalised by |I_C|.
inline constexpr double kGOrthogonality = 1.08;

}  // namespace tfa::calibrated

namespace tfa::calibrated {

/// Greedy energy_f / ‖f‖₂ (and energy_g / ‖g‖₂) on random collections.
inline constexpr double kEnergyPairing = 0.183;
/// Greedy energy_h / ‖(Σ|h_ω|^{r'})^{1/r'}‖_{r'}.
inline constexpr double kEnergyH = 0.241;
/// size_f / sup_s |I_s|^{-1}∫|f|χ̃_{I_s}^M.
inline constexpr double kSizeMajorantF = 0.868;
/// size_h / its averaged ℓ^{r'} majorant.
inline constexpr double kSizeMajorantH = 1.02;
/// energy on S(I₀) against the χ̃_{I₀}-localized norms.
inline constexpr double kLocalEnergyF = 0.690;
inline constexpr double kLocalEnergyH = 0.976;

}  // namespace tfa::calibrated

namespace tfa::calibrated {

/// Σ|I_C| / 2^{2n0} after one f or g stopping time, E the greedy energy.
inline constexpr double kDecomposeMeasureFG = 8.0;
/// Σ|I_T| / 2^{r'n0} after one h stopping time.
inline constexpr double kDecomposeMeasureH = 3.18;
/// max_n Σ|I_T| / 2^{2n} over the levels of a splitting.
inline constexpr double kSplitMeasure = 10.5;
/// |Λ_S| / generic_bound.
inline constexpr double kGenericEstimate = 0.145;

}  // namespace tfa::calibrated

namespace tfa::calibrated {

/// max_n #Ω_n / 2^n for the Whitney cover of the disc of radius 2 (depth 12, shells 2..11).
inline constexpr double kShellCount = 30.3;

}  // namespace tfa::calibrated
