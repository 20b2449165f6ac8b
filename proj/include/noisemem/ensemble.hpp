#pragma once

#include <noisemem/analytics.hpp>
#include <noisemem/photon_stats.hpp>

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace noisemem {

using Complex = std::complex<double>;

/// Field correlation h(dx) = s / sinh(s), s = (1 - i) sqrt(dx) / 2, for
/// dx >= 0, extended by h(-dx) = conj(h(dx)). |h(dx)|^2 equals eval_f(|dx|).
Complex field_kernel(double dx);

/// Covariance <t_j t_k^*> = mean_t h(x_j - x_k) on a frequency grid.
struct FieldCovariance {
  std::vector<double> grid;
  double mean_t = 0.0;
  Eigen::MatrixXcd matrix;
};

FieldCovariance build_field_covariance(std::vector<double> grid, double mean_t);

/// R realizations of complex transmission amplitudes on K grid points,
/// stored row-major (one row per realization).
class SpeckleEnsemble {
public:
  SpeckleEnsemble(std::vector<double> grid, double mean_t, std::uint64_t seed, std::size_t realizations,
                  std::vector<Complex> amplitudes);

  std::size_t realizations() const { return realizations_; }
  std::size_t grid_size() const { return grid_.size(); }
  const std::vector<double> &grid() const { return grid_; }
  double mean_t() const { return mean_t_; }
  std::uint64_t seed() const { return seed_; }

  Complex amplitude(std::size_t r, std::size_t k) const { return amplitudes_[r * grid_.size() + k]; }
  double intensity(std::size_t r, std::size_t k) const { return std::norm(amplitude(r, k)); }
  std::span<const Complex> row(std::size_t r) const {
    return {amplitudes_.data() + r * grid_.size(), grid_.size()};
  }
  std::span<const Complex> amplitudes() const { return amplitudes_; }

private:
  std::vector<double> grid_;
  double mean_t_;
  std::uint64_t seed_;
  std::size_t realizations_;
  std::vector<Complex> amplitudes_;
};

/// Draws circular Gaussian vectors with covariance `cov` from a Cholesky
/// factor. Round-off indefiniteness (eigenvalues >= -1e-10 mean_t) is clipped
/// and a 1e-12 mean_t jitter added; anything worse throws
/// CovarianceModelError. Realization r uses its own keyed substream, so the
/// result does not depend on `workers`.
SpeckleEnsemble generate_ensemble(const FieldCovariance &cov, std::size_t realizations, std::uint64_t seed,
                                  unsigned workers = 1);

/// Text dump: header `realization,grid_index,re,im`, one row per amplitude.
void write_ensemble_csv(std::ostream &out, const SpeckleEnsemble &ens);
SpeckleEnsemble read_ensemble_csv(std::istream &in, std::vector<double> grid, double mean_t,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Moments

struct MomentRecord {
  std::string name;
  double x = 0.0;  ///< offset of the pair (0 for single-frequency moments)
  int order = 0;   ///< power of mean_t carried by the moment
  double empirical = 0.0;
  double std_error = 0.0;
  double theory = 0.0;
  double z = 0.0;
};

struct MomentReport {
  double mean_t = 0.0;
  std::size_t realizations = 0;
  std::vector<MomentRecord> records;

  /// Throws std::out_of_range when no record matches.
  const MomentRecord &find(std::string_view name, double x) const;
};

/// Empirical moments of T at the first grid point and of each pair (0, k)
/// with jackknife errors, paired with the circular-Gaussian predictions.
/// Requires at least 100 realizations.
MomentReport estimate_moments(const SpeckleEnsemble &ens);

// ---------------------------------------------------------------------------
// Noise correlation

enum class EstimationMode { analytic_variance, counting };

std::string_view to_string(EstimationMode mode);

/// Technical noise with variance noise_scale <n>^2 T^2.
struct ClassicalNoise {
  double mean_photons = 1.0;
  double noise_scale = 1.0;
};

using NoiseSource = std::variant<QuantumState, ClassicalNoise>;

/// Per-realization photon-number variances v[r * K + k].
struct VarianceTable {
  std::size_t realizations = 0;
  std::size_t grid_size = 0;
  std::vector<double> values;
  std::size_t clamped = 0; ///< samples with |t|^2 > 1 clamped to 1
};

/// analytic_variance evaluates the variance law at T = |t|^2; counting draws
/// `shots` counts per point and takes their unbiased sample variance.
VarianceTable noise_variances(const SpeckleEnsemble &ens, const NoiseSource &source, EstimationMode mode,
                              std::size_t shots, std::uint64_t seed, unsigned workers = 1);

struct BootstrapOptions {
  std::size_t resamples = 200;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct CorrelationBatch {
  std::vector<CorrelationCurve> curves;      ///< one per table
  std::vector<CorrelationCurve> differences; ///< one per requested pair (a - b)
};

/// Plug-in estimator mean[v_0 v_k] / (mean[v_0] mean[v_k]) - 1 for every
/// table, with bootstrap errors. All tables share the same resampled
/// realization indices, so differences between curves get paired errors.
CorrelationBatch correlate_variances(std::span<const VarianceTable *const> tables, std::span<const double> grid,
                                     const BootstrapOptions &opts,
                                     std::span<const std::pair<std::size_t, std::size_t>> differences = {});

struct NoiseEstimateOptions {
  EstimationMode mode = EstimationMode::analytic_variance;
  std::size_t shots = 1000;
  std::uint64_t seed = 0;
  std::size_t bootstrap_resamples = 200;
  unsigned workers = 1;
};

struct NoiseCorrelationEstimate {
  CorrelationCurve curve;
  EstimationMode mode = EstimationMode::analytic_variance;
  NoiseSource source;
  std::size_t shots_per_realization = 0;
  std::size_t clamped = 0;
};

NoiseCorrelationEstimate estimate_noise_correlation(const SpeckleEnsemble &ens, const NoiseSource &source,
                                                    const NoiseEstimateOptions &opts);

// ---------------------------------------------------------------------------
// Intensity distribution

struct RayleighCheck {
  double ks_statistic = 0.0;
  double p_value = 0.0;
  double significance = 0.0;
  bool passed = false;
  double fitted_mean = 0.0;
  double fitted_mean_stderr = 0.0;
  double mean_z = 0.0;
};

/// Kolmogorov-Smirnov test of T at the first grid point against an
/// exponential law with mean mean_t. Requires at least 1000 realizations.
RayleighCheck rayleigh_check(const SpeckleEnsemble &ens, double significance = 0.01);

/// Asymptotic Kolmogorov survival function Q(lambda).
double kolmogorov_survival(double lambda);

} // namespace noisemem
