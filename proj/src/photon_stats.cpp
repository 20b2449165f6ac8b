#include <noisemem/errors.hpp>
#include <noisemem/photon_stats.hpp>

#include <cmath>
#include <random>
#include <string>

namespace noisemem {

std::string_view to_string(StateKind kind) {
  switch (kind) {
  case StateKind::fock:
    return "fock";
  case StateKind::coherent:
    return "coherent";
  case StateKind::thermal:
    return "thermal";
  case StateKind::custom:
    return "custom";
  }
  return "unknown";
}

StateKind parse_state_kind(std::string_view name) {
  if (name == "fock")
    return StateKind::fock;
  if (name == "coherent")
    return StateKind::coherent;
  if (name == "thermal")
    return StateKind::thermal;
  if (name == "custom")
    return StateKind::custom;
  throw DomainError("unknown state kind '" + std::string(name) + "'");
}

namespace {
void check_mean(double mean) {
  if (!std::isfinite(mean) || mean < 0.0)
    throw DomainError("mean photon number must be finite and >= 0");
}
} // namespace

QuantumState QuantumState::fock(std::uint64_t photons) {
  return {StateKind::fock, static_cast<double>(photons), 0.0};
}

QuantumState QuantumState::coherent(double mean_photons) {
  check_mean(mean_photons);
  return {StateKind::coherent, mean_photons, 1.0};
}

QuantumState QuantumState::thermal(double mean_photons) {
  check_mean(mean_photons);
  return {StateKind::thermal, mean_photons, 1.0 + mean_photons};
}

QuantumState QuantumState::custom(double mean_photons, double fano) {
  check_mean(mean_photons);
  if (!std::isfinite(fano) || fano < 0.0)
    throw DomainError("Fano factor must be finite and >= 0");
  return {StateKind::custom, mean_photons, fano};
}

ChannelTransmission::ChannelTransmission(double t) : t_(t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw DomainError("transmission must lie in [0, 1], got " + std::to_string(t));
}

double transmitted_variance_quantum(const QuantumState &state, ChannelTransmission trans) {
  const double n = state.mean_photons();
  const double t = trans.value();
  return n * t + n * (state.fano() - 1.0) * t * t;
}

double transmitted_variance_classical(double mean_photons, ChannelTransmission trans, double noise_scale) {
  check_mean(mean_photons);
  if (!std::isfinite(noise_scale) || noise_scale <= 0.0)
    throw DomainError("classical noise scale must be > 0");
  const double nt = mean_photons * trans.value();
  return noise_scale * nt * nt;
}

std::uint64_t draw_transmitted_count(const QuantumState &state, ChannelTransmission trans, Engine &rng) {
  const double t = trans.value();
  const double mean = state.mean_photons() * t;
  switch (state.kind()) {
  case StateKind::fock: {
    std::binomial_distribution<std::uint64_t> law(static_cast<std::uint64_t>(state.mean_photons()), t);
    return law(rng);
  }
  case StateKind::coherent: {
    if (mean <= 0.0)
      return 0;
    std::poisson_distribution<std::uint64_t> law(mean);
    return law(rng);
  }
  case StateKind::thermal: {
    if (mean <= 0.0)
      return 0;
    // Failures before first success with p = 1/(1+mean) has the requested mean.
    std::geometric_distribution<std::uint64_t> law(1.0 / (1.0 + mean));
    return law(rng);
  }
  case StateKind::custom:
    break;
  }
  throw UnsupportedSamplingError("custom states have no canonical photon-count law");
}

std::vector<std::uint64_t> sample_transmitted_counts(const QuantumState &state, ChannelTransmission trans,
                                                     std::size_t shots, Engine &rng) {
  if (state.kind() == StateKind::custom)
    throw UnsupportedSamplingError("custom states have no canonical photon-count law");
  if (shots < 1)
    throw DomainError("at least one shot is required");
  std::vector<std::uint64_t> counts(shots);
  for (auto &c : counts)
    c = draw_transmitted_count(state, trans, rng);
  return counts;
}

CountSummary summarize_counts(std::span<const std::uint64_t> counts) {
  const std::size_t n = counts.size();
  if (n < 2)
    throw EstimationError("need at least two counts for a variance");

  double sum = 0.0;
  for (auto c : counts)
    sum += static_cast<double>(c);
  const double mean = sum / static_cast<double>(n);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double dn = static_cast<double>(n);
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;

  CountSummary s;
  s.shots = n;
  s.mean = mean;
  s.variance = m2 * dn / (dn - 1.0);
  s.mean_stderr = std::sqrt(m2 / dn);
  const double var_of_var = (m4 - m2 * m2 * (dn - 3.0) / (dn - 1.0)) / dn;
  s.variance_stderr = std::sqrt(std::max(var_of_var, 0.0));
  if (mean <= 0.0)
    throw EstimationError("Fano factor undefined for zero mean count");

  s.fano = s.variance / mean;
  // Delta method for v / m with Cov(m, v) ~ m3 / n.
  const double var_f = var_of_var / (mean * mean) - 2.0 * s.variance * (m3 / dn) / (mean * mean * mean) +
                       s.variance * s.variance * (m2 / dn) / (mean * mean * mean * mean);
  s.fano_stderr = std::sqrt(std::max(var_f, 0.0));
  return s;
}

} // namespace noisemem
