#include <immintrin.h>

#include <cmath>

#include "poly.hpp"
#include "stochtube/rng.hpp"
#include "stochtube/simd/kernels.hpp"

namespace stochtube::simd::avx2 {
namespace {

using namespace detail;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

__m256d log_unit(__m256d u) {
  const __m256i bits = _mm256_castpd_si256(u);
  __m256d e = _mm256_sub_pd(
      _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(
                        _mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(static_cast<long long>(kTwo52Bits)))),
                    set1(kTwo52)),
      set1(1023.0));
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(static_cast<long long>(kMantMask))),
                      _mm256_set1_epi64x(static_cast<long long>(kExpOne))));
  const __m256d big = _mm256_cmp_pd(m, set1(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, set1(1.0)), big);

  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, set1(1.0)), _mm256_add_pd(m, set1(1.0)));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = set1(kLogCoef[kLogTerms - 1]);
  for (int i = kLogTerms - 2; i >= 0; --i) p = _mm256_add_pd(_mm256_mul_pd(p, s2), set1(kLogCoef[i]));
  const __m256d tail =
      _mm256_add_pd(_mm256_mul_pd(e, set1(kLn2Lo)), _mm256_mul_pd(_mm256_mul_pd(set1(2.0), s), p));
  return _mm256_add_pd(_mm256_mul_pd(e, set1(kLn2Hi)), tail);
}

void sincos_turn(__m256d u, __m256d& s, __m256d& c) {
  const __m256d k = _mm256_floor_pd(_mm256_add_pd(_mm256_mul_pd(u, set1(4.0)), set1(0.5)));
  const __m256d x = _mm256_mul_pd(set1(kTwoPi), _mm256_sub_pd(u, _mm256_mul_pd(k, set1(0.25))));
  const __m256d x2 = _mm256_mul_pd(x, x);
  __m256d ps = set1(kSin[kTrigTerms - 1]);
  __m256d pc = set1(kCos[kTrigTerms - 1]);
  for (int i = kTrigTerms - 2; i >= 0; --i) {
    ps = _mm256_add_pd(_mm256_mul_pd(ps, x2), set1(kSin[i]));
    pc = _mm256_add_pd(_mm256_mul_pd(pc, x2), set1(kCos[i]));
  }
  const __m256d sn = _mm256_mul_pd(x, ps);
  const __m256d cs = pc;
  const __m256d neg = set1(-0.0);
  const __m256d nsn = _mm256_xor_pd(sn, neg);
  const __m256d ncs = _mm256_xor_pd(cs, neg);

  const __m256d q1 = _mm256_cmp_pd(k, set1(1.0), _CMP_EQ_OQ);
  const __m256d q2 = _mm256_cmp_pd(k, set1(2.0), _CMP_EQ_OQ);
  const __m256d q3 = _mm256_cmp_pd(k, set1(3.0), _CMP_EQ_OQ);
  s = _mm256_blendv_pd(_mm256_blendv_pd(_mm256_blendv_pd(sn, cs, q1), nsn, q2), ncs, q3);
  c = _mm256_blendv_pd(_mm256_blendv_pd(_mm256_blendv_pd(cs, nsn, q1), ncs, q2), sn, q3);
}

// Four Philox4x32-10 streams, one per 64-bit lane; each lane holds a 32-bit word.
void philox4(std::uint64_t seed, __m256i traj, std::uint64_t step, __m256i& w1, __m256i& w2) {
  const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i m0 = _mm256_set1_epi64x(rng::kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(rng::kPhiloxM1);
  __m256i c0 = _mm256_set1_epi64x(static_cast<long long>(step & 0xFFFFFFFFull));
  __m256i c1 = _mm256_set1_epi64x(static_cast<long long>(step >> 32));
  __m256i c2 = _mm256_and_si256(traj, lo32);
  __m256i c3 = _mm256_srli_epi64(traj, 32);
  auto k0 = static_cast<std::uint32_t>(seed);
  auto k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int round = 0; round < 10; ++round) {
    const __m256i p0 = _mm256_mul_epu32(c0, m0);
    const __m256i p1 = _mm256_mul_epu32(c2, m1);
    const __m256i hi0 = _mm256_srli_epi64(p0, 32);
    const __m256i lo0 = _mm256_and_si256(p0, lo32);
    const __m256i hi1 = _mm256_srli_epi64(p1, 32);
    const __m256i lo1 = _mm256_and_si256(p1, lo32);
    c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), _mm256_set1_epi64x(k0));
    c1 = lo1;
    c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), _mm256_set1_epi64x(k1));
    c3 = lo0;
    k0 += rng::kPhiloxW0;
    k1 += rng::kPhiloxW1;
  }
  w1 = _mm256_or_si256(_mm256_slli_epi64(c0, 32), c1);
  w2 = _mm256_or_si256(_mm256_slli_epi64(c2, 32), c3);
}

struct Velocity {
  __m256d vx, vy;
};

template <DriftParams::Kind K>
Velocity drift_of(const DriftParams& d, __m256d x, __m256d y) {
  const __m256d p0 = set1(d.p[0]);
  const __m256d p1 = set1(d.p[1]);
  const __m256d p2 = set1(d.p[2]);
  if constexpr (K == DriftParams::Kind::Hopf) {
    const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)));
    const __m256d g = _mm256_mul_pd(p0, _mm256_sub_pd(p1, r));
    return {_mm256_sub_pd(_mm256_mul_pd(g, x), _mm256_mul_pd(p2, y)),
            _mm256_add_pd(_mm256_mul_pd(g, y), _mm256_mul_pd(p2, x))};
  } else if constexpr (K == DriftParams::Kind::VanDerPol) {
    const __m256d np0 = set1(-d.p[0]);
    const __m256d t = _mm256_mul_pd(_mm256_mul_pd(np0, _mm256_sub_pd(_mm256_mul_pd(x, x), p1)), y);
    return {y, _mm256_sub_pd(t, _mm256_mul_pd(_mm256_mul_pd(p2, p2), x))};
  } else if constexpr (K == DriftParams::Kind::Rayleigh) {
    const __m256d cube = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(x, x), x), set1(3.0));
    const __m256d t = _mm256_mul_pd(p0, _mm256_sub_pd(cube, _mm256_mul_pd(p1, x)));
    return {_mm256_sub_pd(y, t), _mm256_mul_pd(_mm256_mul_pd(set1(-d.p[2]), p2), x)};
  } else {
    const __m256d p3 = set1(d.p[3]);
    return {_mm256_add_pd(_mm256_mul_pd(p0, x), _mm256_mul_pd(p1, y)),
            _mm256_add_pd(_mm256_mul_pd(p2, x), _mm256_mul_pd(p3, y))};
  }
}

template <DriftParams::Kind K>
std::size_t em_body(const DriftParams& drift, double dt, double scale, std::size_t count, double* x,
                    double* y, const double* gx, const double* gy) {
  const __m256d vdt = set1(dt);
  const __m256d vs = set1(scale);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    const Velocity v = drift_of<K>(drift, xi, yi);
    const __m256d nx = _mm256_add_pd(_mm256_add_pd(xi, _mm256_mul_pd(v.vx, vdt)),
                                     _mm256_mul_pd(vs, _mm256_loadu_pd(gx + i)));
    const __m256d ny = _mm256_add_pd(_mm256_add_pd(yi, _mm256_mul_pd(v.vy, vdt)),
                                     _mm256_mul_pd(vs, _mm256_loadu_pd(gy + i)));
    _mm256_storeu_pd(x + i, nx);
    _mm256_storeu_pd(y + i, ny);
  }
  return i;
}

}  // namespace

void normals(std::uint64_t seed, std::uint64_t first_traj, std::uint64_t step, std::size_t count,
             double* gx, double* gy) {
  const __m256i exp_one = _mm256_set1_epi64x(static_cast<long long>(kExpOne));
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const auto t0 = static_cast<long long>(first_traj + i);
    const __m256i traj = _mm256_add_epi64(_mm256_set1_epi64x(t0), _mm256_setr_epi64x(0, 1, 2, 3));
    __m256i w1;
    __m256i w2;
    philox4(seed, traj, step, w1, w2);
    const __m256d u1 = _mm256_sub_pd(
        set1(2.0), _mm256_castsi256_pd(_mm256_or_si256(exp_one, _mm256_srli_epi64(w1, 12))));
    const __m256d u2 = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(exp_one, _mm256_srli_epi64(w2, 12))), set1(1.0));
    const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(set1(-2.0), log_unit(u1)));
    __m256d s;
    __m256d c;
    sincos_turn(u2, s, c);
    _mm256_storeu_pd(gx + i, _mm256_mul_pd(r, c));
    _mm256_storeu_pd(gy + i, _mm256_mul_pd(r, s));
  }
  if (i < count) scalar::normals(seed, first_traj + i, step, count - i, gx + i, gy + i);
}

void em_step(const DriftParams& drift, double dt, double scale, std::size_t count, double* x,
             double* y, const double* gx, const double* gy) {
  std::size_t done = 0;
  switch (drift.kind) {
    case DriftParams::Kind::Hopf:
      done = em_body<DriftParams::Kind::Hopf>(drift, dt, scale, count, x, y, gx, gy);
      break;
    case DriftParams::Kind::VanDerPol:
      done = em_body<DriftParams::Kind::VanDerPol>(drift, dt, scale, count, x, y, gx, gy);
      break;
    case DriftParams::Kind::Rayleigh:
      done = em_body<DriftParams::Kind::Rayleigh>(drift, dt, scale, count, x, y, gx, gy);
      break;
    case DriftParams::Kind::Linear:
      done = em_body<DriftParams::Kind::Linear>(drift, dt, scale, count, x, y, gx, gy);
      break;
  }
  if (done < count) {
    scalar::em_step(drift, dt, scale, count - done, x + done, y + done, gx + done, gy + done);
  }
}

std::size_t nearest(double px, double py, const double* cx, const double* cy, std::size_t m) {
  std::size_t i = 0;
  std::size_t best = 0;
  double best_d = INFINITY;
  if (m >= 4) {
    const __m256d vpx = set1(px);
    const __m256d vpy = set1(py);
    __m256d bd = set1(INFINITY);
    __m256d bi = _mm256_setzero_pd();
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d four = set1(4.0);
    for (; i + 4 <= m; i += 4) {
      const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(cx + i), vpx);
      const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(cy + i), vpy);
      const __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      const __m256d lt = _mm256_cmp_pd(d, bd, _CMP_LT_OQ);
      bd = _mm256_blendv_pd(bd, d, lt);
      bi = _mm256_blendv_pd(bi, idx, lt);
      idx = _mm256_add_pd(idx, four);
    }
    alignas(32) double lane_d[4];
    alignas(32) double lane_i[4];
    _mm256_store_pd(lane_d, bd);
    _mm256_store_pd(lane_i, bi);
    for (int l = 0; l < 4; ++l) {
      const auto li = static_cast<std::size_t>(lane_i[l]);
      if (lane_d[l] < best_d || (lane_d[l] == best_d && li < best)) {
        best_d = lane_d[l];
        best = li;
      }
    }
  }
  for (; i < m; ++i) {
    const double dx = cx[i] - px;
    const double dy = cy[i] - py;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace stochtube::simd::avx2
