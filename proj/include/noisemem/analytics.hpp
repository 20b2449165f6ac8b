#pragma once

#include <optional>
#include <string>
#include <vector>

namespace noisemem {

/// Slab of thickness L with transport mean free path ell and diffusion
/// constant D. Only ell <= L (multiple scattering) is accepted.
class DiffusionGeometry {
public:
  DiffusionGeometry(double thickness, double mean_free_path, double diffusion);

  /// Unit-free geometry with ell = 1, D = 1 and L = L/ell.
  static DiffusionGeometry from_ratio(double l_over_ell);

  double thickness() const { return thickness_; }
  double mean_free_path() const { return mean_free_path_; }
  double diffusion() const { return diffusion_; }
  /// Correlation frequency scale D / (2 L^2).
  double omega_d() const { return omega_d_; }
  double l_over_ell() const { return thickness_ / mean_free_path_; }
  /// Prefactor 3 L^2 / (2 ell^2) of the non-Gaussian term.
  double mesoscopic_prefactor() const;

private:
  double thickness_;
  double mean_free_path_;
  double diffusion_;
  double omega_d_;
};

/// Frequency offset in units of omega_d. Finite and non-negative.
class NormalizedOffset {
public:
  explicit NormalizedOffset(double x);
  static NormalizedOffset from_frequency(double delta_omega, const DiffusionGeometry &geom);

  double value() const { return x_; }

private:
  double x_;
};

struct CurvePoint {
  double x = 0.0;
  double value = 0.0;
  std::optional<double> std_error;
};

/// Sampled correlation function. x is strictly increasing.
struct CorrelationCurve {
  std::string label;
  std::vector<CurvePoint> points;

  /// Appends a point, rejecting non-increasing x or a negative error.
  void append(double x, double value, std::optional<double> std_error = std::nullopt);
  std::size_t size() const { return points.size(); }
};

/// Below this x both f and g switch to their Taylor series.
inline constexpr double kSeriesThreshold = 1e-4;

/// Intensity correlation decay x / (cosh sqrt(x) - cos sqrt(x)), f(0) = 1.
double eval_f(NormalizedOffset x);

/// (1/x) (sinh sqrt(x) - sin sqrt(x)) / (cosh sqrt(x) - cos sqrt(x)).
/// Throws DivergenceError at x = 0.
double eval_g(NormalizedOffset x);

/// Shot-noise correlation, identical to f.
double corr_shot_noise(NormalizedOffset x);

/// Classical-noise correlation f^2 + 4 f.
double corr_classical_noise(NormalizedOffset x);

/// Noise correlation for an arbitrary Fano factor with Gaussian moments of T
/// substituted exactly. mean_t is the ensemble-averaged transmission.
double corr_quantum_full(NormalizedOffset x, double fano, double mean_t);

struct ExpansionTerms {
  double c_one = 0.0; ///< leading shot-noise-like term, f
  double c_two = 0.0; ///< mesoscopic g-term plus the 4 (F - 1) f T term
};

ExpansionTerms corr_expansion_terms(NormalizedOffset x, double fano, double mean_t,
                                    const DiffusionGeometry &geom);

/// <T T'> including the lowest-order non-Gaussian correction.
double mesoscopic_product_moment(NormalizedOffset x, double mean_t,
                                 const DiffusionGeometry &geom);

namespace detail {
// Exposed for crossover tests. No argument checking.
double f_series(double x);
double f_direct(double x);
double g_series(double x);
double g_direct(double x);
} // namespace detail

} // namespace noisemem
