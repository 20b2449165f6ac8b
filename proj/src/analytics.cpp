#include <noisemem/analytics.hpp>
#include <noisemem/errors.hpp>

#include <cmath>
#include <string>

namespace noisemem {

namespace {

// Beyond sqrt(x) = 40 the cos/sin terms are below 1e-17 relative to cosh/sinh.
constexpr double kAsymptoticRoot = 40.0;

void check_mean_t(double mean_t) {
  if (!std::isfinite(mean_t) || mean_t <= 0.0 || mean_t > 1.0)
    throw DomainError("mean transmission must lie in (0, 1], got " + std::to_string(mean_t));
}

void check_fano(double fano) {
  if (!std::isfinite(fano) || fano < 0.0)
    throw DomainError("Fano factor must be finite and >= 0, got " + std::to_string(fano));
}

} // namespace

DiffusionGeometry::DiffusionGeometry(double thickness, double mean_free_path, double diffusion)
    : thickness_(thickness), mean_free_path_(mean_free_path), diffusion_(diffusion),
      omega_d_(diffusion / (2.0 * thickness * thickness)) {
  if (!(std::isfinite(thickness) && thickness > 0.0) ||
      !(std::isfinite(mean_free_path) && mean_free_path > 0.0) ||
      !(std::isfinite(diffusion) && diffusion > 0.0))
    throw DomainError("geometry requires finite L > 0, ell > 0, D > 0");
  if (mean_free_path > thickness)
    throw DomainError("mean free path exceeds slab thickness; not in the multiple-scattering regime");
}

DiffusionGeometry DiffusionGeometry::from_ratio(double l_over_ell) {
  return DiffusionGeometry(l_over_ell, 1.0, 1.0);
}

double DiffusionGeometry::mesoscopic_prefactor() const {
  const double r = l_over_ell();
  return 1.5 * r * r;
}

NormalizedOffset::NormalizedOffset(double x) : x_(x) {
  if (!std::isfinite(x) || x < 0.0)
    throw DomainError("normalized offset must be finite and >= 0, got " + std::to_string(x));
}

NormalizedOffset NormalizedOffset::from_frequency(double delta_omega, const DiffusionGeometry &geom) {
  return NormalizedOffset(delta_omega / geom.omega_d());
}

void CorrelationCurve::append(double x, double value, std::optional<double> std_error) {
  if (!points.empty() && !(x > points.back().x))
    throw DomainError("curve offsets must be strictly increasing");
  if (std_error && !(*std_error >= 0.0))
    throw DomainError("standard error must be >= 0");
  points.push_back({x, value, std_error});
}

namespace detail {

double f_series(double x) {
  const double x2 = x * x;
  return 1.0 / (1.0 + x2 / 360.0 + x2 * x2 / 1814400.0);
}

double f_direct(double x) {
  const double y = std::sqrt(x);
  if (y > kAsymptoticRoot)
    return 2.0 * x * std::exp(-y);
  // cosh y - cos y = 2 (sinh^2(y/2) + sin^2(y/2)), free of cancellation.
  const double sh = std::sinh(0.5 * y);
  const double sn = std::sin(0.5 * y);
  return x / (2.0 * (sh * sh + sn * sn));
}

double g_series(double x) {
  const double x2 = x * x;
  const double num = 1.0 / 3.0 + x2 / 2520.0 + x2 * x2 / 19958400.0;
  const double den = 1.0 + x2 / 360.0 + x2 * x2 / 1814400.0;
  return num / (den * std::sqrt(x));
}

double g_direct(double x) {
  const long double y = std::sqrt(static_cast<long double>(x));
  if (y > kAsymptoticRoot)
    return 1.0 / x;
  // sinh y - sin y cancels to O(y^3); extended precision keeps ~1e-15 near the switch.
  const long double num = std::sinh(y) - std::sin(y);
  const long double sh = std::sinh(0.5L * y);
  const long double sn = std::sin(0.5L * y);
  const long double den = 2.0L * (sh * sh + sn * sn);
  return static_cast<double>(num / (den * x));
}

} // namespace detail

double eval_f(NormalizedOffset x) {
  const double v = x.value();
  return v < kSeriesThreshold ? detail::f_series(v) : detail::f_direct(v);
}

double eval_g(NormalizedOffset x) {
  const double v = x.value();
  if (v == 0.0)
    throw DivergenceError("g diverges at zero frequency offset");
  return v < kSeriesThreshold ? detail::g_series(v) : detail::g_direct(v);
}

double corr_shot_noise(NormalizedOffset x) { return eval_f(x); }

double corr_classical_noise(NormalizedOffset x) {
  const double f = corr_shot_noise(x);
  return f * f + 4.0 * f;
}

double corr_quantum_full(NormalizedOffset x, double fano, double mean_t) {
  check_fano(fano);
  check_mean_t(mean_t);
  const double excess = fano - 1.0;
  const double q = mean_t;
  const double scale = 1.0 + 2.0 * excess * q;
  if (std::abs(scale) < 1e-12)
    throw SingularParameterError("1 + 2 (F - 1) T vanishes; noise correlation undefined");

  const double f = eval_f(x);
  // <TT'> + (F-1)(<T^2T'> + <TT'^2>) + (F-1)^2 <T^2T'^2>, divided by q^2.
  const double num = (1.0 + f) + 4.0 * excess * q * (1.0 + 2.0 * f) +
                     4.0 * excess * excess * q * q * (1.0 + 4.0 * f + f * f);
  return num / (scale * scale) - 1.0;
}

ExpansionTerms corr_expansion_terms(NormalizedOffset x, double fano, double mean_t,
                                    const DiffusionGeometry &geom) {
  check_fano(fano);
  check_mean_t(mean_t);
  const double g = eval_g(x);
  const double f = eval_f(x);
  return {f, geom.mesoscopic_prefactor() * g * mean_t + 4.0 * (fano - 1.0) * f * mean_t};
}

double mesoscopic_product_moment(NormalizedOffset x, double mean_t, const DiffusionGeometry &geom) {
  check_mean_t(mean_t);
  const double g = eval_g(x);
  const double f = eval_f(x);
  const double q = mean_t;
  return q * q * (1.0 + f) + geom.mesoscopic_prefactor() * g * q * q * q;
}

} // namespace noisemem
