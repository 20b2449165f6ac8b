#pragma once

#include <noisemem/substream.hpp>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace noisemem {

enum class StateKind { fock, coherent, thermal, custom };

std::string_view to_string(StateKind kind);
StateKind parse_state_kind(std::string_view name);

/// Single-mode input state described by its mean photon number and Fano
/// factor. The named constructors fix the Fano factor of each kind.
class QuantumState {
public:
  static QuantumState fock(std::uint64_t photons);
  static QuantumState coherent(double mean_photons);
  /// Bose-Einstein light: Fano = 1 + mean.
  static QuantumState thermal(double mean_photons);
  static QuantumState custom(double mean_photons, double fano);

  StateKind kind() const { return kind_; }
  double mean_photons() const { return mean_photons_; }
  double fano() const { return fano_; }

private:
  QuantumState(StateKind kind, double mean, double fano) : kind_(kind), mean_photons_(mean), fano_(fano) {}

  StateKind kind_;
  double mean_photons_;
  double fano_;
};

/// Intensity transmission coefficient in [0, 1].
class ChannelTransmission {
public:
  explicit ChannelTransmission(double t);
  double value() const { return t_; }

private:
  double t_;
};

/// Photon-number variance after the channel: <n> T + <n> (F - 1) T^2.
double transmitted_variance_quantum(const QuantumState &state, ChannelTransmission trans);

/// Technical-noise variance noise_scale * <n>^2 T^2.
double transmitted_variance_classical(double mean_photons, ChannelTransmission trans,
                                      double noise_scale = 1.0);

/// Draws one count from the loss-transformed law of the state: binomial for
/// Fock, Poisson for coherent, geometric for thermal light.
std::uint64_t draw_transmitted_count(const QuantumState &state, ChannelTransmission trans, Engine &rng);

/// `shots` independent counts. Throws UnsupportedSamplingError for custom states.
std::vector<std::uint64_t> sample_transmitted_counts(const QuantumState &state, ChannelTransmission trans,
                                                     std::size_t shots, Engine &rng);

/// Sample moments of a count record with delta-method standard errors.
struct CountSummary {
  std::size_t shots = 0;
  double mean = 0.0;
  double mean_stderr = 0.0;
  double variance = 0.0; ///< unbiased
  double variance_stderr = 0.0;
  double fano = 0.0;
  double fano_stderr = 0.0;
};

CountSummary summarize_counts(std::span<const std::uint64_t> counts);

} // namespace noisemem
