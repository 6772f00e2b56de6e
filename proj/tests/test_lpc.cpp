#include <doctest.h>

#include <cmath>
#include <complex>

#include "accentmix/lpc.hpp"
#include "helpers.hpp"

using namespace accentmix;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Oracle: solve the p x p Toeplitz normal equations R a = -r by plain
// Gaussian elimination with partial pivoting. Independent of the
// Levinson-Durbin recursion it checks.
std::vector<double> dense_toeplitz_solve(const std::vector<double>& r,
                                         int order) {
  const int p = order;
  std::vector<std::vector<double>> m(p, std::vector<double>(p + 1));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) m[i][j] = r[static_cast<std::size_t>(std::abs(i - j))];
    m[i][p] = -r[static_cast<std::size_t>(i) + 1];
  }
  for (int col = 0; col < p; ++col) {
    int pivot = col;
    for (int row = col + 1; row < p; ++row)
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    std::swap(m[col], m[pivot]);
    for (int row = col + 1; row < p; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int k = col; k <= p; ++k) m[row][k] -= f * m[col][k];
    }
  }
  std::vector<double> a(p);
  for (int row = p - 1; row >= 0; --row) {
    double acc = m[row][p];
    for (int k = row + 1; k < p; ++k) acc -= m[row][k] * a[static_cast<std::size_t>(k)];
    a[static_cast<std::size_t>(row)] = acc / m[row][row];
  }
  return a;
}

// Valid autocorrelation sequences come from actual signals.
std::vector<double> random_autocorr(RngStream& rng, int max_lag) {
  const std::size_t n = 64 + rng.below(192);
  std::vector<double> x = testutil::random_signal(rng, n, 1.0);
  return autocorrelate(x, max_lag);
}

PoleSet random_stable_poleset(RngStream& rng, int max_order) {
  PoleSet set;
  int budget = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_order - 1)));
  while (budget >= 2) {
    if (budget >= 2 && rng.uniform() < 0.8) {
      Pole p;
      p.radius = rng.uniform(0.3, 0.95);
      p.angle = rng.uniform(0.05, kPi - 0.05);
      set.poles.push_back(p);
      Pole q = p;
      q.angle = -p.angle;
      set.poles.push_back(q);
      budget -= 2;
    } else {
      Pole p;
      p.radius = rng.uniform(0.1, 0.9);
      p.angle = rng.uniform() < 0.5 ? 0.0 : kPi;
      set.poles.push_back(p);
      budget -= 1;
    }
  }
  return set;
}

}  // namespace

TEST_CASE("autocorrelate basics") {
  SUBCASE("all-zero frame") {
    std::vector<double> x(32, 0.0);
    const auto r = autocorrelate(x, 5);
    for (double v : r) CHECK(v == 0.0);
  }
  SUBCASE("unit impulse") {
    std::vector<double> x(16, 0.0);
    x[0] = 1.0;
    const auto r = autocorrelate(x, 4);
    CHECK(r[0] == 1.0);
    for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k] == 0.0);
  }
  SUBCASE("matches the O(n^2) definition on random frames") {
    RngStream rng(33);
    for (int trial = 0; trial < 50; ++trial) {
      const std::vector<double> x = testutil::random_signal(rng, 40 + rng.below(100), 1.0);
      const int max_lag = static_cast<int>(rng.below(std::min<std::size_t>(x.size(), 20)));
      const auto r = autocorrelate(x, max_lag);
      for (int k = 0; k <= max_lag; ++k) {
        double want = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < x.size(); ++i)
          want += x[i] * x[i + static_cast<std::size_t>(k)];
        REQUIRE(r[static_cast<std::size_t>(k)] == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
  SUBCASE("invalid lag") {
    std::vector<double> x(8, 1.0);
    CHECK_THROWS_AS(autocorrelate(x, 8), InvalidLag);
    CHECK_THROWS_AS(autocorrelate(x, -1), InvalidLag);
  }
}

TEST_CASE("levinson_durbin closed forms") {
  SUBCASE("white noise gives zero coefficients") {
    const std::vector<double> r{1.0, 0.0, 0.0, 0.0, 0.0};
    const LpcModel m = levinson_durbin(r, 4);
    REQUIRE(m.coeffs.size() == 4);
    for (double c : m.coeffs) CHECK(c == 0.0);
  }
  SUBCASE("AR(1) with rho = 0.9") {
    // 1x1 normal equation: a1 = -r1/r0.
    std::vector<double> r(8);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = std::pow(0.9, static_cast<double>(k));
    const LpcModel m = levinson_durbin(r, 1);
    REQUIRE(m.coeffs.size() == 1);
    CHECK(m.coeffs[0] == doctest::Approx(-0.9).epsilon(1e-12));
  }
  SUBCASE("degenerate frame") {
    const std::vector<double> r{0.0, 0.0};
    CHECK_THROWS_AS(levinson_durbin(r, 1), DegenerateFrame);
  }
}

TEST_CASE("levinson_durbin equals the dense Toeplitz solve") {
  RngStream rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const int order = 1 + static_cast<int>(rng.below(12));
    const auto r = random_autocorr(rng, order);
    if (r[0] <= kEnergyEps) continue;
    const LpcModel m = levinson_durbin(r, order);
    const auto want = dense_toeplitz_solve(r, order);
    for (int k = 0; k < order; ++k)
      REQUIRE(std::abs(m.coeffs[static_cast<std::size_t>(k)] -
                       want[static_cast<std::size_t>(k)]) < 1e-8);
  }
}

TEST_CASE("models from levinson_durbin are minimum phase") {
  RngStream rng(45);
  for (int trial = 0; trial < 40; ++trial) {
    const int order = 2 + static_cast<int>(rng.below(14));
    const auto r = random_autocorr(rng, order);
    if (r[0] <= kEnergyEps) continue;
    const LpcModel m = levinson_durbin(r, order);
    const PoleSet poles = lpc_to_poles(m);
    for (const Pole& p : poles.poles) REQUIRE(p.radius < 1.0);
  }
}

TEST_CASE("lpc_to_poles closed forms") {
  SUBCASE("conjugate pair at 0.9 exp(+-i pi/3)") {
    // (1 - 0.9 e^{i pi/3} z^-1)(1 - 0.9 e^{-i pi/3} z^-1)
    //   = 1 - 0.9 z^-1 + 0.81 z^-2
    LpcModel m;
    m.order = 2;
    m.coeffs = {-0.9, 0.81};
    const PoleSet set = lpc_to_poles(m);
    REQUIRE(set.poles.size() == 2);
    CHECK(set.poles[0].radius == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(set.poles[0].angle == doctest::Approx(kPi / 3.0).epsilon(1e-10));
    CHECK(set.poles[1].radius == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(set.poles[1].angle == doctest::Approx(-kPi / 3.0).epsilon(1e-10));
  }
  SUBCASE("single real pole") {
    LpcModel m;
    m.order = 1;
    m.coeffs = {-0.5};
    const PoleSet set = lpc_to_poles(m);
    REQUIRE(set.poles.size() == 1);
    CHECK(set.poles[0].radius == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(set.poles[0].angle == 0.0);
  }
  SUBCASE("order zero") {
    LpcModel m;
    const PoleSet set = lpc_to_poles(m);
    CHECK(set.poles.empty());
  }
}

TEST_CASE("root residuals stay below the bound") {
  RngStream rng(46);
  for (int trial = 0; trial < 60; ++trial) {
    const PoleSet set = random_stable_poleset(rng, 24);
    const LpcModel m = poles_to_lpc(set);
    const PoleSet back = lpc_to_poles(m);
    double norm2 = 0.0;
    for (double c : m.coeffs) norm2 += c * c;
    norm2 = std::sqrt(norm2);
    for (const Pole& p : back.poles) {
      std::complex<double> z = p.to_complex(), val = 1.0;
      for (double c : m.coeffs) val = val * z + c;
      REQUIRE(std::abs(val) <= kRootResidualTol * std::max(1.0, norm2));
    }
  }
}

TEST_CASE("poles_to_lpc closed forms and errors") {
  SUBCASE("conjugate pair expands to (-0.9, 0.81)") {
    PoleSet set;
    set.poles.push_back({0.9, kPi / 3.0});
    set.poles.push_back({0.9, -kPi / 3.0});
    const LpcModel m = poles_to_lpc(set);
    REQUIRE(m.coeffs.size() == 2);
    CHECK(m.coeffs[0] == doctest::Approx(-0.9).epsilon(1e-12));
    CHECK(m.coeffs[1] == doctest::Approx(0.81).epsilon(1e-12));
  }
  SUBCASE("empty set gives order zero") {
    const LpcModel m = poles_to_lpc(PoleSet{});
    CHECK(m.order == 0);
    CHECK(m.coeffs.empty());
  }
  SUBCASE("unpaired complex pole is rejected") {
    PoleSet set;
    set.poles.push_back({0.8, 1.1});
    CHECK_THROWS_AS(poles_to_lpc(set), ConjugateMismatch);
  }
  SUBCASE("imaginary residue stays tiny on random closed sets") {
    RngStream rng(47);
    for (int trial = 0; trial < 40; ++trial) {
      const PoleSet set = random_stable_poleset(rng, 24);
      double residue = 1.0;
      (void)poles_to_lpc(set, &residue);
      REQUIRE(residue < kImagResidueTol);
    }
  }
}

TEST_CASE("pole <-> coefficient round trips") {
  RngStream rng(48);
  for (int trial = 0; trial < 60; ++trial) {
    const PoleSet set = random_stable_poleset(rng, 24);
    const LpcModel m = poles_to_lpc(set);
    const PoleSet back = lpc_to_poles(m);
    const LpcModel m2 = poles_to_lpc(back);
    REQUIRE(m2.coeffs.size() == m.coeffs.size());
    for (std::size_t i = 0; i < m.coeffs.size(); ++i)
      REQUIRE(std::abs(m2.coeffs[i] - m.coeffs[i]) < 1e-6);
  }
}

TEST_CASE("inverse filter") {
  SUBCASE("order zero is the identity") {
    const std::vector<double> x{0.4, -0.2, 0.9};
    const auto e = inverse_filter(x, LpcModel{});
    CHECK(e == x);
  }
  SUBCASE("impulse through a1 = -0.5") {
    std::vector<double> x(6, 0.0);
    x[0] = 1.0;
    LpcModel m;
    m.order = 1;
    m.coeffs = {-0.5};
    const auto e = inverse_filter(x, m);
    CHECK(e[0] == 1.0);
    CHECK(e[1] == -0.5);
    for (std::size_t i = 2; i < e.size(); ++i) CHECK(e[i] == 0.0);
  }
}

TEST_CASE("synthesis filter") {
  SUBCASE("zero residual, zero state -> zero output") {
    LpcModel m;
    m.order = 2;
    m.coeffs = {-0.5, 0.25};
    FilterState state(2);
    const std::vector<double> e(16, 0.0);
    const auto y = synthesis_filter(e, m, state);
    for (double v : y) CHECK(v == 0.0);
  }
  SUBCASE("AR(1) impulse response is 0.5^n") {
    LpcModel m;
    m.order = 1;
    m.coeffs = {-0.5};
    FilterState state(1);
    std::vector<double> e(10, 0.0);
    e[0] = 1.0;
    const auto y = synthesis_filter(e, m, state);
    for (std::size_t n = 0; n < y.size(); ++n)
      REQUIRE(y[n] == doctest::Approx(std::pow(0.5, static_cast<double>(n)))
                          .epsilon(1e-12));
  }
  SUBCASE("unstable model is rejected") {
    LpcModel m;
    m.order = 1;
    m.coeffs = {-1.0};  // pole exactly on the unit circle
    FilterState state(1);
    const std::vector<double> e(4, 0.0);
    CHECK_THROWS_AS(synthesis_filter(e, m, state), UnstableFilter);
  }
  SUBCASE("inverts inverse_filter exactly with matched state") {
    RngStream rng(49);
    for (int trial = 0; trial < 40; ++trial) {
      const PoleSet set = random_stable_poleset(rng, 16);
      const LpcModel m = poles_to_lpc(set);
      const std::vector<double> x = testutil::random_signal(rng, 200, 1.0);
      const auto e = inverse_filter(x, m);
      FilterState state(m.order);
      const auto y = synthesis_filter(e, m, state);
      REQUIRE(y.size() == x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        REQUIRE(std::abs(y[i] - x[i]) < 1e-9);
    }
  }
  SUBCASE("state carries across chunks") {
    LpcModel m;
    m.order = 2;
    m.coeffs = {-0.8, 0.3};
    RngStream rng(50);
    const std::vector<double> e = testutil::random_signal(rng, 120, 1.0);

    FilterState whole_state(2);
    const auto whole = synthesis_filter(e, m, whole_state);

    FilterState chunk_state(2);
    const std::vector<double> e1(e.begin(), e.begin() + 70);
    const std::vector<double> e2(e.begin() + 70, e.end());
    const auto y1 = synthesis_filter(e1, m, chunk_state);
    const auto y2 = synthesis_filter(e2, m, chunk_state);
    for (std::size_t i = 0; i < 70; ++i) REQUIRE(y1[i] == whole[i]);
    for (std::size_t i = 0; i < e2.size(); ++i) REQUIRE(y2[i] == whole[70 + i]);
  }
}

TEST_CASE("stable_within respects the margin") {
  LpcModel m;
  m.order = 1;
  m.coeffs = {-0.9};
  CHECK(stable_within(m));
  m.coeffs = {-(1.0 - 1e-9)};  // inside the circle but inside the margin too
  CHECK_FALSE(stable_within(m, 1e-7));
  CHECK(stable_within(m, 1e-10));
}
