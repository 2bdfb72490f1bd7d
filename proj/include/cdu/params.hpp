#pragma once

// Uncertain scalar parameters and sample spaces. Each parameter has a truncated
// Gaussian marginal whose spread comes from a relative calibration: the stated
// central confidence interval at the stated level spans nominal*(1 +- fraction).
// Marginal draws are keyed by (seed, parameter index, sample index), so any two
// consumers asking for the same parameter of the same sample see the same value.

#include <cstdint>
#include <string>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/rng.hpp"

namespace cdu {

// Direction of a design problem's dependence on a parameter: harmful parameters
// make the problem harder as they grow (power coefficients, masses, costs),
// helpful ones make it easier (energy density, energy per cost, cycle life,
// velocity limits). Anything non-monotone must stay Unspecified and is rejected
// by the interval machinery.
enum class ParamEffect : std::uint8_t { Unspecified, Harmful, Helpful };

struct Calibration {
  double fraction = 0.05;  // relative half-width of the calibrated interval
  double level = 0.90;     // central probability mass of that interval
};

// sigma such that the central `level` interval of N(nominal, sigma^2) is
// nominal*(1 +- fraction).
inline double sigma_from_calibration(double nominal, const Calibration& c) {
  require(c.fraction >= 0.0, "sigma_from_calibration: fraction must be >= 0");
  require(c.level > 0.0 && c.level < 1.0, "sigma_from_calibration: level must lie in (0,1)");
  if (c.fraction == 0.0) return 0.0;
  const double z = normal_quantile(0.5 * (1.0 + c.level));
  return c.fraction * nominal / z;
}

struct ParamSpec {
  std::string name;  // unique within a sample space
  std::string unit;
  double nominal = 0.0;
  Calibration calib;
  double lower_bound = 0.0;  // truncation point of the marginal
  ParamEffect effect = ParamEffect::Unspecified;
  std::string block;  // independence block, e.g. "task", "bat:NiMH", "act:a1"
};

// One joint draw, aligned with the owning space's parameter order.
struct OmegaPoint {
  std::vector<double> value;
};

class SampleSpace {
 public:
  std::size_t add(ParamSpec spec) {
    for (const ParamSpec& p : params_) {
      require(p.name != spec.name, "sample space: duplicate parameter name");
    }
    params_.push_back(std::move(spec));
    return params_.size() - 1;
  }

  std::size_t size() const { return params_.size(); }
  const ParamSpec& param(std::size_t i) const { return params_.at(i); }
  const std::vector<ParamSpec>& params() const { return params_; }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (params_[i].name == name) return i;
    }
    throw contract_error("sample space: unknown parameter '" + name + "'");
  }

  double sigma(std::size_t i) const {
    const ParamSpec& p = param(i);
    return sigma_from_calibration(p.nominal, p.calib);
  }

  // Marginal draw of one parameter for one sample. The key depends only on
  // (seed, parameter, sample), never on who is asking.
  double sample_param(std::size_t i, std::uint64_t seed, std::uint64_t sample_index) const {
    const ParamSpec& p = param(i);
    Stream s(stream_key(seed, StreamDomain::Omega, i, sample_index));
    return s.truncated_gaussian(p.nominal, sigma(i), p.lower_bound);
  }

  std::vector<std::size_t> block_indices(const std::string& block) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (params_[i].block == block) out.push_back(i);
    }
    return out;
  }

  // Block labels in first-appearance order.
  std::vector<std::string> blocks() const {
    std::vector<std::string> out;
    for (const ParamSpec& p : params_) {
      bool seen = false;
      for (const std::string& b : out) seen = seen || b == p.block;
      if (!seen) out.push_back(p.block);
    }
    return out;
  }

 private:
  std::vector<ParamSpec> params_;
};

// Joint draw: independent truncated-Gaussian marginals. Degenerate calibrations
// (fraction 0) reproduce the nominals exactly.
inline OmegaPoint sample_omega(const SampleSpace& space, std::uint64_t seed,
                               std::uint64_t sample_index) {
  OmegaPoint w;
  w.value.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    w.value[i] = space.sample_param(i, seed, sample_index);
  }
  return w;
}

}  // namespace cdu
