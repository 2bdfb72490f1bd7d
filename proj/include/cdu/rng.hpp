#pragma once

// Counter-based random streams. A stream is addressed by (seed, domain, block,
// index) and is stateless apart from its draw counter, so any draw is a pure
// function of its key: results never depend on evaluation order or worker count.

#include <cmath>
#include <cstdint>

#include "cdu/common.hpp"

namespace cdu {

// Stream domains. Keeping these disjoint guarantees that e.g. policy-estimation
// draws can never collide with the world-parameter draws they are conditioned on.
enum class StreamDomain : std::uint64_t {
  Omega = 1,        // sample-space parameter draws, block = parameter index
  Kernel = 2,       // generic kernel stages, block = flat stage counter
  PolicyInner = 3,  // nested Monte Carlo inside policy estimation
  Test = 900,       // scratch streams inside the test suites
};

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t domain = 0;
  std::uint64_t block = 0;
  std::uint64_t index = 0;
};

inline StreamKey stream_key(std::uint64_t seed, StreamDomain domain, std::uint64_t block,
                            std::uint64_t index) {
  return {seed, static_cast<std::uint64_t>(domain), block, index};
}

inline std::uint64_t stream_word(const StreamKey& k, std::uint64_t counter) {
  std::uint64_t h = mix64(k.seed);
  h = mix64(h ^ k.domain);
  h = mix64(h ^ k.block);
  h = mix64(h ^ k.index);
  h = mix64(h ^ counter);
  return h;
}

// Inverse of the standard normal CDF, rational approximation (Acklam) refined by
// one Halley step against erfc; relative error well below the 1e-6 contract.
inline double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p must lie strictly inside (0,1)");
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Quantile of a Gaussian truncated below at lo. At the calibrations used here the
// truncated mass is negligible, but the formula stays exact either way.
inline double truncated_gaussian_quantile(double mu, double sigma, double lo, double p) {
  if (sigma == 0.0) return mu;
  const double phi_lo = normal_cdf((lo - mu) / sigma);
  return mu + sigma * normal_quantile(phi_lo + p * (1.0 - phi_lo));
}

// One logical stream of draws.
class Stream {
 public:
  explicit Stream(StreamKey key) : key_(key) {}

  // Uniform on the open interval (0,1); never returns an endpoint.
  double u01() {
    const std::uint64_t w = stream_word(key_, counter_++);
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian(double mu, double sigma) { return mu + sigma * normal_quantile(u01()); }

  // Truncated below at lo by rejection; the retry budget matches the contract.
  double truncated_gaussian(double mu, double sigma, double lo) {
    if (sigma == 0.0) {
      if (mu < lo) throw numeric_error("truncated_gaussian: degenerate mean below bound");
      return mu;
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double x = gaussian(mu, sigma);
      if (x >= lo) return x;
    }
    throw numeric_error("truncated_gaussian: rejection budget (1000) exhausted");
  }

 private:
  StreamKey key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cdu
