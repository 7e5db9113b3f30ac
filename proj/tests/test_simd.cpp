#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "stochtube/dynamics.hpp"
#include "stochtube/rng.hpp"
#include "stochtube/simd/kernels.hpp"

using namespace stochtube;
using simd::DriftParams;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

const simd::Kernels& reference() { return simd::kernels(simd::Isa::Scalar); }

// The kernels under test: every table this build and CPU can run.
std::vector<const simd::Kernels*> candidates() {
  std::vector<const simd::Kernels*> out{&reference()};
  if (simd::cpu_has_avx2()) out.push_back(&simd::kernels(simd::Isa::Avx2));
  return out;
}

const DriftParams kDrifts[] = {
    {DriftParams::Kind::Hopf, {1.0, 1.0, 1.0, 0.0}},
    {DriftParams::Kind::Hopf, {0.7, 1.6, -2.0, 0.0}},
    {DriftParams::Kind::VanDerPol, {0.2, 3.0, 1.0, 0.0}},
    {DriftParams::Kind::Rayleigh, {0.8, 3.0, 1.0, 0.0}},
    {DriftParams::Kind::Linear, {-1.0, 0.3, -0.2, -0.5}},
};

}  // namespace

TEST(Philox, KnownAnswerVectors) {
  // Published Philox4x32-10 test vectors.
  constexpr rng::Block zero = rng::philox4x32({0u, 0u, 0u, 0u}, 0u, 0u);
  static_assert(zero[0] == 0x6627e8d5u && zero[3] == 0x9b00dbd8u);
  EXPECT_EQ(zero, (rng::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, 0xffffffffu, 0xffffffffu),
            (rng::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, 0xa4093822u, 0x299f31d0u),
            (rng::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(SimdMath, LogMatchesLibm) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = i < 1000 ? std::ldexp(1.0, -i % 53) * (1.0 - u(gen) * 0.5) : u(gen);
    if (x <= 0.0) continue;
    const double ref = std::log(x);
    const double got = simd::scalar::log_unit(x);
    if (ref != 0.0) worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
    else EXPECT_EQ(got, 0.0);
  }
  EXPECT_EQ(simd::scalar::log_unit(1.0), 0.0);
  EXPECT_LT(worst, 4e-15);
}

TEST(SimdMath, SinCosOfTurnsMatchesLibm) {
  double worst = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double t = i / 100000.0 * (1.0 - 1e-12);
    double s = 0.0, c = 0.0;
    simd::scalar::sincos_turn(t, s, c);
    worst = std::max({worst, std::abs(s - std::sin(2.0 * M_PI * t)), std::abs(c - std::cos(2.0 * M_PI * t))});
  }
  EXPECT_LT(worst, 2e-15);
}

TEST(SimdKernels, NormalsAreBitwiseIdenticalAcrossIsas) {
  for (const simd::Kernels* k : candidates()) {
    for (std::size_t count : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 512u, 1001u}) {
      for (std::uint64_t first : {0ull, 3ull, 1ull << 33}) {
        for (std::uint64_t step : {0ull, 17ull, (1ull << 32) + 5}) {
          std::vector<double> ax(count), ay(count), bx(count), by(count);
          reference().normals(42, first, step, count, ax.data(), ay.data());
          k->normals(42, first, step, count, bx.data(), by.data());
          for (std::size_t i = 0; i < count; ++i) {
            ASSERT_TRUE(same_bits(ax[i], bx[i])) << simd::isa_name(k->isa) << " count=" << count << " i=" << i;
            ASSERT_TRUE(same_bits(ay[i], by[i]));
          }
        }
      }
    }
  }
}

TEST(SimdKernels, NormalsDependOnlyOnTrajectoryAndStep) {
  // Splitting the trajectory range into blocks must not change any value.
  for (const simd::Kernels* k : candidates()) {
    std::vector<double> whole_x(100), whole_y(100);
    k->normals(7, 0, 9, 100, whole_x.data(), whole_y.data());
    for (std::size_t i = 0; i < 100; i += 13) {
      double gx = 0.0, gy = 0.0;
      k->normals(7, i, 9, 1, &gx, &gy);
      EXPECT_TRUE(same_bits(gx, whole_x[i]));
      EXPECT_TRUE(same_bits(gy, whole_y[i]));
    }
    double other = 0.0, tmp = 0.0;
    k->normals(8, 0, 9, 1, &other, &tmp);
    EXPECT_NE(other, whole_x[0]);
  }
}

TEST(SimdKernels, NormalsAreStandardGaussian) {
  const std::size_t n = 1 << 20;
  std::vector<double> gx(n), gy(n);
  simd::active().normals(2024, 0, 0, n, gx.data(), gy.data());
  double m1 = 0.0, m2 = 0.0, m4 = 0.0, cross = 0.0;
  std::size_t beyond3 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (double g : {gx[i], gy[i]}) {
      m1 += g;
      m2 += g * g;
      m4 += g * g * g * g;
      if (std::abs(g) > 3.0) ++beyond3;
    }
    cross += gx[i] * gy[i];
  }
  const double total = 2.0 * n;
  m1 /= total;
  m2 /= total;
  m4 /= total;
  cross /= n;
  // Tolerances are about 5 standard errors of each estimator.
  EXPECT_NEAR(m1, 0.0, 5.0 / std::sqrt(total));
  EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / total));
  EXPECT_NEAR(m4, 3.0, 5.0 * std::sqrt(96.0 / total));
  EXPECT_NEAR(cross, 0.0, 5.0 / std::sqrt(static_cast<double>(n)));
  const double p3 = std::erfc(3.0 / std::sqrt(2.0));
  EXPECT_NEAR(beyond3 / total, p3, 5.0 * std::sqrt(p3 / total));
}

TEST(SimdKernels, EulerMaruyamaIsBitwiseIdenticalAcrossIsas) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::normal_distribution<double> g;
  for (const simd::Kernels* k : candidates()) {
    for (const DriftParams& d : kDrifts) {
      for (std::size_t count : {1u, 3u, 4u, 6u, 13u, 256u}) {
        std::vector<double> x(count), y(count), gx(count), gy(count);
        for (std::size_t i = 0; i < count; ++i) {
          x[i] = u(gen);
          y[i] = u(gen);
          gx[i] = g(gen);
          gy[i] = g(gen);
        }
        std::vector<double> rx = x, ry = y;
        reference().em_step(d, 1e-3, 0.01, count, rx.data(), ry.data(), gx.data(), gy.data());
        k->em_step(d, 1e-3, 0.01, count, x.data(), y.data(), gx.data(), gy.data());
        for (std::size_t i = 0; i < count; ++i) {
          ASSERT_TRUE(same_bits(x[i], rx[i])) << simd::isa_name(k->isa) << " kind=" << static_cast<int>(d.kind);
          ASSERT_TRUE(same_bits(y[i], ry[i]));
        }
      }
    }
  }
}

TEST(SimdKernels, EulerMaruyamaDriftMatchesDynamics) {
  // The kernels hard-code the drift; it must agree bitwise with velocity().
  const SystemSpec specs[] = {SystemSpec::hopf(0.7, 1.6, -2.0), SystemSpec::van_der_pol(0.2),
                              SystemSpec::rayleigh(0.8)};
  const DriftParams params[] = {kDrifts[1], kDrifts[2], kDrifts[3]};
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double dt = 1e-3;
  for (int s = 0; s < 3; ++s) {
    for (int i = 0; i < 100; ++i) {
      double x = u(gen), y = u(gen);
      const double zero = 0.0;
      const State v = velocity(specs[s], {x, y});
      const double ex = x + v.x * dt, ey = y + v.y * dt;
      reference().em_step(params[s], dt, 0.0, 1, &x, &y, &zero, &zero);
      EXPECT_TRUE(same_bits(x, ex));
      EXPECT_TRUE(same_bits(y, ey));
    }
  }
}

TEST(SimdKernels, NearestIsBitwiseIdenticalAndPrefersLowestIndex) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const simd::Kernels* k : candidates()) {
    for (std::size_t m : {1u, 2u, 5u, 8u, 63u, 4096u}) {
      std::vector<double> cx(m), cy(m);
      for (std::size_t i = 0; i < m; ++i) {
        cx[i] = u(gen);
        cy[i] = u(gen);
      }
      for (int q = 0; q < 200; ++q) {
        const double px = u(gen), py = u(gen);
        std::size_t best = 0;
        double bd = INFINITY;
        for (std::size_t i = 0; i < m; ++i) {
          const double dx = cx[i] - px, dy = cy[i] - py;
          const double d = dx * dx + dy * dy;
          if (d < bd) {
            bd = d;
            best = i;
          }
        }
        ASSERT_EQ(k->nearest(px, py, cx.data(), cy.data(), m), best);
      }
    }
    // Exact ties resolve to the first occurrence.
    const double tx[] = {1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0};
    const double ty[] = {0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0};
    EXPECT_EQ(k->nearest(0.0, 0.0, tx, ty, 9), 0u);
    EXPECT_EQ(k->nearest(0.0, 0.5, tx, ty, 9), 1u);
    EXPECT_EQ(k->nearest(0.0, -0.5, tx + 4, ty + 4, 5), 3u);
  }
}

TEST(SimdKernels, DispatchTables) {
  EXPECT_EQ(reference().isa, simd::Isa::Scalar);
  EXPECT_EQ(simd::isa_name(simd::Isa::Scalar), "scalar");
  const simd::Kernels& active = simd::active();
  const char* env = std::getenv("STOCHTUBE_SIMD");
  if (env != nullptr && std::string(env) == "scalar") {
    EXPECT_EQ(active.isa, simd::Isa::Scalar);
  } else if (simd::cpu_has_avx2()) {
    EXPECT_EQ(active.isa, simd::Isa::Avx2);
  }
}
