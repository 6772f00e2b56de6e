#include "accentmix/lpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace accentmix {

namespace {

constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

// Evaluates the monic polynomial z^n + c[0] z^(n-1) + ... + c[n-1] and its
// derivative at z.
void eval_monic(const std::vector<double>& c, cplx z, cplx* val, cplx* deriv) {
  const std::size_t n = c.size();
  cplx p = 1.0, dp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dp = dp * z + p;
    p = p * z + c[i];
  }
  *val = p;
  if (deriv) *deriv = dp;
}

using lcplx = std::complex<long double>;

// Extended-precision variant for the final polish: clustered roots of
// large-norm polynomials rattle at the double-precision evaluation noise
// floor, which is too coarse for the pole/coefficient round-trip contract.
void eval_monic_ld(const std::vector<double>& c, lcplx z, lcplx* val,
                   lcplx* deriv) {
  lcplx p = 1.0L, dp = 0.0L;
  for (double ci : c) {
    dp = dp * z + p;
    p = p * z + static_cast<long double>(ci);
  }
  *val = p;
  if (deriv) *deriv = dp;
}

std::vector<cplx> aberth_roots(const std::vector<double>& coeffs) {
  const std::size_t n = coeffs.size();
  std::vector<cplx> z(n);
  if (n == 0) return z;

  // Initial guesses on a circle of radius given by the Cauchy coefficient
  // bound, centered at the centroid, with a fixed angular offset so the
  // start configuration is not mirror-symmetric about the real axis.
  double bound = 0.0;
  for (double c : coeffs) bound = std::max(bound, std::abs(c));
  const double radius = std::max(1e-3, 1.0 + bound);
  const cplx center(-coeffs[0] / static_cast<double>(n), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta =
        2.0 * kPi * static_cast<double>(k) / static_cast<double>(n) + 0.7;
    z[k] = center + std::polar(radius, theta);
  }

  const double norm2 = std::sqrt(std::inner_product(
      coeffs.begin(), coeffs.end(), coeffs.begin(), 0.0));
  const double step_tol = 1e-12;
  const double residual_bound = kRootResidualTol * std::max(1.0, norm2);

  // Converged when the largest correction is negligible. Once corrections
  // are small (< 1e-8) and stop shrinking, the iteration is rattling at the
  // rounding-noise floor of the polynomial evaluation; accept and let the
  // polish plus residual check below decide.
  bool converged = false;
  double best_step = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  for (int iter = 0; iter < kRootIterationCap && !converged; ++iter) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      cplx p, dp;
      eval_monic(coeffs, z[k], &p, &dp);
      if (std::abs(p) == 0.0) continue;
      if (std::abs(dp) == 0.0) dp = 1e-30;
      const cplx newton = p / dp;
      cplx repulse = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        cplx diff = z[k] - z[j];
        if (std::abs(diff) < 1e-30) diff = 1e-30;
        repulse += 1.0 / diff;
      }
      const cplx denom = 1.0 - newton * repulse;
      const cplx delta =
          std::abs(denom) < 1e-30 ? newton : newton / denom;
      z[k] -= delta;
      max_step = std::max(max_step,
                          std::abs(delta) / std::max(1.0, std::abs(z[k])));
    }
    if (max_step < 0.5 * best_step) {
      best_step = max_step;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    converged = max_step < step_tol || (max_step < 1e-5 && stagnant >= 15);
  }
  if (!converged)
    throw RootFindingDiverged("Aberth iteration did not converge within " +
                              std::to_string(kRootIterationCap) + " steps");

  // Extended-precision Newton polish: pushes each root below the double
  // noise floor so real roots sit on the axis, conjugate mates line up for
  // pairing, and re-expansion stays within the round-trip tolerance.
  for (cplx& root : z) {
    lcplx r(root.real(), root.imag());
    for (int it = 0; it < 40; ++it) {
      lcplx p, dp;
      eval_monic_ld(coeffs, r, &p, &dp);
      if (std::abs(dp) == 0.0L) break;
      const lcplx delta = p / dp;
      r -= delta;
      if (std::abs(delta) <=
          1e-17L * std::max<long double>(1.0L, std::abs(r)))
        break;
    }
    root = cplx(static_cast<double>(r.real()), static_cast<double>(r.imag()));
  }

  for (const cplx& root : z) {
    cplx p;
    eval_monic(coeffs, root, &p, nullptr);
    if (std::abs(p) > residual_bound)
      throw RootFindingDiverged("root residual " + std::to_string(std::abs(p)) +
                                " exceeds bound");
  }
  return z;
}

Pole real_pole(double re) {
  Pole p;
  p.radius = std::abs(re);
  p.angle = re < 0.0 ? kPi : 0.0;
  return p;
}

}  // namespace

std::vector<double> autocorrelate(std::span<const double> frame, int max_lag) {
  const std::size_t n = frame.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n)
    throw InvalidLag("max_lag " + std::to_string(max_lag) +
                     " out of range for frame of length " + std::to_string(n));
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i)
      acc += frame[i] * frame[i + static_cast<std::size_t>(k)];
    r[static_cast<std::size_t>(k)] = acc;
  }
  return r;
}

LpcModel levinson_durbin(std::span<const double> autocorr, int order) {
  if (order < 0) throw InvalidLag("negative LPC order");
  if (autocorr.size() < static_cast<std::size_t>(order) + 1)
    throw InvalidLag("autocorrelation too short for order " +
                     std::to_string(order));
  if (autocorr[0] <= kEnergyEps)
    throw DegenerateFrame("frame energy " + std::to_string(autocorr[0]) +
                          " below threshold");

  LpcModel model;
  model.order = order;
  model.coeffs.assign(static_cast<std::size_t>(order), 0.0);

  std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
  a[0] = 1.0;
  double err = autocorr[0];
  for (int m = 1; m <= order; ++m) {
    double acc = autocorr[static_cast<std::size_t>(m)];
    for (int i = 1; i < m; ++i)
      acc += a[static_cast<std::size_t>(i)] *
             autocorr[static_cast<std::size_t>(m - i)];
    const double k = -acc / err;
    for (int i = 1; i <= m / 2; ++i) {
      const double tmp = a[static_cast<std::size_t>(i)] +
                         k * a[static_cast<std::size_t>(m - i)];
      a[static_cast<std::size_t>(m - i)] += k * a[static_cast<std::size_t>(i)];
      a[static_cast<std::size_t>(i)] = tmp;
    }
    a[static_cast<std::size_t>(m)] = k;
    err *= 1.0 - k * k;
    if (err <= kEnergyEps) {
      // Perfectly predictable already; remaining reflections are zero.
      break;
    }
  }
  std::copy(a.begin() + 1, a.end(), model.coeffs.begin());
  return model;
}

PoleSet lpc_to_poles(const LpcModel& model) {
  PoleSet out;
  if (model.order == 0) return out;

  std::vector<cplx> roots = aberth_roots(model.coeffs);

  // Partition into near-real roots and complex ones, then pair the complex
  // roots with their nearest conjugates. Pairing is greedy over a
  // deterministic ordering so results are reproducible.
  std::vector<cplx> upper, lower;
  std::vector<Pole> reals;
  for (const cplx& z : roots) {
    if (std::abs(z.imag()) <= kConjImagEps)
      reals.push_back(real_pole(z.real()));
    else if (z.imag() > 0.0)
      upper.push_back(z);
    else
      lower.push_back(z);
  }
  auto by_real_imag = [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return std::abs(a.imag()) < std::abs(b.imag());
  };
  std::sort(upper.begin(), upper.end(), by_real_imag);
  std::sort(lower.begin(), lower.end(), by_real_imag);

  if (upper.size() != lower.size())
    throw ConjugateMismatch("unpaired complex roots (" +
                            std::to_string(upper.size()) + " upper vs " +
                            std::to_string(lower.size()) + " lower)");

  std::vector<bool> used(lower.size(), false);
  std::vector<Pole> pairs;
  for (const cplx& u : upper) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = lower.size();
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(std::conj(u) - lower[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    used[best_j] = true;
    // Average the pair so closure is exact by construction.
    const cplx m = 0.5 * (u + std::conj(lower[best_j]));
    Pole p;
    p.radius = std::abs(m);
    p.angle = std::abs(std::arg(m));
    pairs.push_back(p);
  }

  auto pole_order = [](const Pole& a, const Pole& b) {
    if (a.radius != b.radius) return a.radius > b.radius;
    return a.angle < b.angle;
  };
  std::sort(pairs.begin(), pairs.end(), pole_order);
  std::sort(reals.begin(), reals.end(), pole_order);

  for (const Pole& p : pairs) {
    out.poles.push_back(p);
    Pole conj = p;
    conj.angle = -p.angle;
    out.poles.push_back(conj);
  }
  for (const Pole& p : reals) out.poles.push_back(p);
  return out;
}

bool conjugate_closed(const PoleSet& poles) {
  std::vector<std::size_t> upper, lower;
  for (std::size_t i = 0; i < poles.poles.size(); ++i) {
    const Pole& p = poles.poles[i];
    const double im = p.radius * std::sin(p.angle);
    if (std::abs(im) <= kConjImagEps) continue;
    (im > 0.0 ? upper : lower).push_back(i);
  }
  if (upper.size() != lower.size()) return false;
  std::vector<bool> used(lower.size(), false);
  for (std::size_t ui : upper) {
    const cplx u = poles.poles[ui].to_complex();
    bool matched = false;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const cplx l = poles.poles[lower[j]].to_complex();
      if (std::abs(std::conj(u) - l) <= 1e-6 * std::max(1.0, std::abs(u))) {
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

LpcModel poles_to_lpc(const PoleSet& poles, double* max_imag_residue) {
  if (!conjugate_closed(poles))
    throw ConjugateMismatch("pole set is not closed under conjugation");

  // Expand prod (z - p_i). coeffs[k] is the coefficient of z^(n-1-k) after
  // the leading 1.
  std::vector<cplx> c{1.0};
  for (const Pole& p : poles.poles) {
    const cplx root = p.to_complex();
    c.push_back(0.0);
    for (std::size_t i = c.size() - 1; i >= 1; --i) c[i] -= root * c[i - 1];
  }

  double max_abs = 1.0, max_imag = 0.0;
  for (const cplx& v : c) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t i = 1; i < c.size(); ++i)
    max_imag = std::max(max_imag, std::abs(c[i].imag()));
  if (max_imag_residue) *max_imag_residue = max_imag;
  if (max_imag > kImagResidueTol * max_abs)
    throw ConjugateMismatch("imaginary residue " + std::to_string(max_imag) +
                            " after expansion");

  LpcModel model;
  model.order = static_cast<int>(poles.poles.size());
  model.coeffs.resize(poles.poles.size());
  for (std::size_t i = 0; i < model.coeffs.size(); ++i)
    model.coeffs[i] = c[i + 1].real();
  return model;
}

std::vector<double> inverse_filter(std::span<const double> frame,
                                   const LpcModel& model) {
  const std::size_t n = frame.size();
  const std::size_t p = model.coeffs.size();
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = frame[i];
    const std::size_t kmax = std::min(p, i);
    for (std::size_t k = 1; k <= kmax; ++k)
      acc += model.coeffs[k - 1] * frame[i - k];
    e[i] = acc;
  }
  return e;
}

bool stable_within(const LpcModel& model, double margin) {
  // Scale the polynomial so roots of radius 1 - margin land on the unit
  // circle, then run the Schur-Cohn step-down: stable iff every reflection
  // coefficient has magnitude < 1.
  const double scale = 1.0 - margin;
  std::vector<double> a(model.coeffs.size() + 1);
  a[0] = 1.0;
  double s = 1.0;
  for (std::size_t k = 1; k < a.size(); ++k) {
    s *= scale;
    a[k] = model.coeffs[k - 1] / s;
  }
  for (std::size_t m = a.size() - 1; m >= 1; --m) {
    const double k = a[m];
    if (std::abs(k) >= 1.0) return false;
    const double denom = 1.0 - k * k;
    std::vector<double> next(m);
    for (std::size_t i = 1; i < m; ++i)
      next[i] = (a[i] - k * a[m - i]) / denom;
    next[0] = 1.0;
    a.swap(next);
  }
  return true;
}

std::vector<double> synthesis_filter(std::span<const double> residual,
                                     const LpcModel& model,
                                     FilterState& state) {
  const std::size_t p = model.coeffs.size();
  if (state.y.size() != p)
    state.y.assign(p, 0.0);
  if (p > 0 && !stable_within(model))
    throw UnstableFilter("synthesis model has a pole at or beyond radius " +
                         std::to_string(1.0 - kStabilityMargin));

  std::vector<double> out(residual.size());
  for (std::size_t i = 0; i < residual.size(); ++i) {
    double acc = residual[i];
    for (std::size_t k = 1; k <= p; ++k) {
      const double past =
          k <= i ? out[i - k] : state.y[k - i - 1];
      acc -= model.coeffs[k - 1] * past;
    }
    out[i] = acc;
  }
  // Carry the last p outputs forward; frames shorter than the order keep
  // the older state entries shifted.
  const std::vector<double> old_state = state.y;
  for (std::size_t k = 0; k < p; ++k)
    state.y[k] = k < out.size() ? out[out.size() - 1 - k]
                                : old_state[k - out.size()];
  return out;
}

}  // namespace accentmix
