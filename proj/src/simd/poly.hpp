#pragma once

#include <cstdint>

// Shared constants of the scalar and AVX2 kernels. Both evaluate the same
// polynomials with the same operation order.
namespace stochtube::simd::detail {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kTwoPi = 6.28318530717958647693;

// log(m) = 2 s * sum_i s^(2i) / (2i + 1), s = (m - 1) / (m + 1), |s| <= 0.1716.
inline constexpr int kLogTerms = 12;
inline constexpr double kLogCoef[kLogTerms] = {
    1.0,        1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0,
    1.0 / 13.0, 1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0, 1.0 / 23.0};

// Taylor coefficients on |x| <= pi/4: sin x = x * sum_i kSin[i] x^(2i), cos x = sum_i kCos[i] x^(2i).
inline constexpr int kTrigTerms = 9;
inline constexpr double kSin[kTrigTerms] = {
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0};
inline constexpr double kCos[kTrigTerms] = {
    1.0,
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0};

inline constexpr std::uint64_t kExpOne = 0x3FF0000000000000ull;
inline constexpr std::uint64_t kMantMask = 0x000FFFFFFFFFFFFFull;
inline constexpr double kTwo52 = 4503599627370496.0;  // 2^52
inline constexpr std::uint64_t kTwo52Bits = 0x4330000000000000ull;

}  // namespace stochtube::simd::detail
