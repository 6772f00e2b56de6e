#ifndef ACCENTMIX_LPC_HPP
#define ACCENTMIX_LPC_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "accentmix/errors.hpp"

namespace accentmix {

// All-pole model A(z) = 1 + a1 z^-1 + ... + ap z^-p. coeffs holds a1..ap.
struct LpcModel {
  int order = 0;
  std::vector<double> coeffs;
};

// One pole in polar form. Polar storage lets the McAdams transform move
// angles while copying radii bit-exactly.
struct Pole {
  double radius = 0.0;
  double angle = 0.0;  // radians in [-pi, pi]

  std::complex<double> to_complex() const {
    return std::polar(radius, angle);
  }
};

struct PoleSet {
  std::vector<Pole> poles;
};

// Tolerance constants shared by the engine and its tests.
inline constexpr double kEnergyEps = 1e-12;      // silent-frame threshold
inline constexpr double kConjImagEps = 1e-6;     // |Im| below this is real
inline constexpr double kRootResidualTol = 1e-8;
inline constexpr double kImagResidueTol = 1e-8;
inline constexpr double kStabilityMargin = 1e-7;
inline constexpr int kRootIterationCap = 200;

// r[k] = sum_n x[n] x[n+k] for k = 0..max_lag. Requires max_lag < len(frame).
std::vector<double> autocorrelate(std::span<const double> frame, int max_lag);

// Solves the LPC normal equations for the given autocorrelation. Throws
// DegenerateFrame when r[0] <= kEnergyEps (silent frame; callers bypass the
// transform for such frames).
LpcModel levinson_durbin(std::span<const double> autocorr, int order);

// Roots of z^p + a1 z^(p-1) + ... + ap by Aberth-Ehrlich simultaneous
// iteration. Residuals are checked against kRootResidualTol and conjugate
// closure is enforced by pairing. Output order is deterministic.
PoleSet lpc_to_poles(const LpcModel& model);

// Expands the poles back into real coefficients. Throws ConjugateMismatch if
// the set is not conjugate-closed, and reports the largest imaginary residue
// discarded if max_imag_residue is non-null.
LpcModel poles_to_lpc(const PoleSet& poles, double* max_imag_residue = nullptr);

bool conjugate_closed(const PoleSet& poles);

// e[n] = x[n] + sum_k a_k x[n-k], zero initial conditions.
std::vector<double> inverse_filter(std::span<const double> frame,
                                   const LpcModel& model);

// Past outputs of the synthesis filter, carried across frames of one
// utterance. state[0] is y[n-1].
struct FilterState {
  std::vector<double> y;

  explicit FilterState(int order = 0) : y(static_cast<std::size_t>(order), 0.0) {}
  void reset() { std::fill(y.begin(), y.end(), 0.0); }
};

// y[n] = e[n] - sum_k a_k y[n-k]. Throws UnstableFilter when any pole radius
// is >= 1 - kStabilityMargin (checked without root finding, via a scaled
// Schur-Cohn step-down).
std::vector<double> synthesis_filter(std::span<const double> residual,
                                     const LpcModel& model,
                                     FilterState& state);

// True when all roots of A(z) have radius < 1 - margin.
bool stable_within(const LpcModel& model, double margin = kStabilityMargin);

}  // namespace accentmix

#endif  // ACCENTMIX_LPC_HPP
