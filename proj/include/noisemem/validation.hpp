#pragma once

#include <noisemem/curves.hpp>
#include <noisemem/photon_stats.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace noisemem::cli {

struct ValidateConfig {
  GridSpec grid;
  std::vector<double> fanos{0.0, 1.0, 2.0};
  double mean_t = 0.01;
  std::size_t realizations = 100000;
  std::size_t shots = 1000;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::size_t bootstrap_resamples = 200;
};

/// Offsets of the Gaussian-moment suite.
inline const std::vector<double> kMomentGrid{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
/// Offsets and realization cap of the counting-mode suite.
inline const std::vector<double> kCountingGrid{0.0, 1.0, 4.0, 16.0};
inline constexpr std::size_t kCountingRealizations = 2000;
/// Shots per case in the photon-sampler suite.
inline constexpr std::size_t kSamplerShots = 1000000;

struct ValidationResult {
  nlohmann::ordered_json report;
  bool passed = false;
};

/// Runs every Monte Carlo suite and collects z-scores. Suites that cannot
/// run (e.g. too few realizations) are reported as failed with their error.
/// The report does not depend on `workers`. Throws DomainError without seed.
ValidationResult run_validation(const ValidateConfig &config);

/// Serialized report with a trailing newline.
std::string dump_report(const nlohmann::ordered_json &report);

struct SampleStatsConfig {
  StateKind kind = StateKind::coherent;
  double mean_photons = 10.0;
  double transmission = 0.3;
  std::size_t shots = 1000;
  std::uint64_t seed = 0;
};

struct SampleStatsResult {
  std::vector<std::uint64_t> counts;
  CountSummary summary;
  double expected_fano = 0.0; ///< 1 + (F - 1) T
  double fano_z = 0.0;
};

QuantumState make_state(StateKind kind, double mean_photons);
SampleStatsResult run_sample_stats(const SampleStatsConfig &config);

} // namespace noisemem::cli
