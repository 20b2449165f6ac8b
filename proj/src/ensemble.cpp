#include <noisemem/ensemble.hpp>
#include <noisemem/errors.hpp>
#include <noisemem/parallel.hpp>
#include <noisemem/substream.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace noisemem {

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty())
    throw DomainError("frequency grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k]) || grid[k] < 0.0)
      throw DomainError("grid offsets must be finite and >= 0");
    if (k > 0 && grid[k] < grid[k - 1])
      throw DomainError("grid offsets must be ordered");
  }
}

void check_mean_t(double mean_t) {
  if (!std::isfinite(mean_t) || mean_t <= 0.0 || mean_t > 1.0)
    throw DomainError("mean transmission must lie in (0, 1]");
}

} // namespace

Complex field_kernel(double dx) {
  if (!std::isfinite(dx))
    throw DomainError("kernel offset must be finite");
  if (dx == 0.0)
    return {1.0, 0.0};
  const double a = 0.5 * std::sqrt(std::abs(dx));
  // |h| ~ 2 sqrt(2) a exp(-a): zero in double long before sinh overflows.
  if (a > 400.0)
    return {0.0, 0.0};
  const Complex s(a, -a);
  const Complex h = s / std::sinh(s);
  return dx > 0.0 ? h : std::conj(h);
}

FieldCovariance build_field_covariance(std::vector<double> grid, double mean_t) {
  check_grid(grid);
  check_mean_t(mean_t);
  const auto k = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd m(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    m(i, i) = mean_t;
    for (Eigen::Index j = 0; j < i; ++j) {
      m(i, j) = mean_t * field_kernel(grid[i] - grid[j]);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return {std::move(grid), mean_t, std::move(m)};
}

SpeckleEnsemble::SpeckleEnsemble(std::vector<double> grid, double mean_t, std::uint64_t seed,
                                 std::size_t realizations, std::vector<Complex> amplitudes)
    : grid_(std::move(grid)), mean_t_(mean_t), seed_(seed), realizations_(realizations),
      amplitudes_(std::move(amplitudes)) {
  check_grid(grid_);
  check_mean_t(mean_t_);
  if (realizations_ < 1)
    throw DomainError("ensemble needs at least one realization");
  if (amplitudes_.size() != realizations_ * grid_.size())
    throw DomainError("amplitude count does not match realizations x grid size");
}

namespace {

Eigen::MatrixXcd cholesky_factor(const FieldCovariance &cov) {
  const double tol = 1e-10 * cov.mean_t;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov.matrix);
  if (eig.info() != Eigen::Success)
    throw CovarianceModelError("eigen-decomposition of the field covariance failed");
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -tol) {
    std::ostringstream msg;
    msg << "field covariance is indefinite on this grid (smallest eigenvalue " << min_eig << ")";
    throw CovarianceModelError(msg.str());
  }

  if (min_eig > 0.0) {
    Eigen::LLT<Eigen::MatrixXcd> llt(cov.matrix);
    if (llt.info() == Eigen::Success)
      return llt.matrixL();
  }

  Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXcd repaired = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
  repaired.diagonal().array() += 1e-12 * cov.mean_t;
  Eigen::LLT<Eigen::MatrixXcd> llt(repaired);
  if (llt.info() != Eigen::Success)
    throw CovarianceModelError("Cholesky factorization failed after eigenvalue clipping");
  return llt.matrixL();
}

} // namespace

SpeckleEnsemble generate_ensemble(const FieldCovariance &cov, std::size_t realizations, std::uint64_t seed,
                                  unsigned workers) {
  if (realizations < 1)
    throw DomainError("ensemble needs at least one realization");
  const std::size_t k = cov.grid.size();
  if (static_cast<std::size_t>(cov.matrix.rows()) != k || static_cast<std::size_t>(cov.matrix.cols()) != k)
    throw DomainError("covariance matrix does not match its grid");
  if (!cov.matrix.isApprox(cov.matrix.adjoint(), 1e-14))
    throw CovarianceModelError("field covariance is not Hermitian");

  const Eigen::MatrixXcd factor = cholesky_factor(cov);
  std::vector<Complex> lower;
  lower.reserve(k * (k + 1) / 2);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      lower.push_back(factor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));

  std::vector<Complex> amps(realizations * k);
  parallel_for(realizations, workers, [&](std::size_t r) {
    Engine rng = substream(seed, StreamTag::ensemble, r);
    // Circular: independent real and imaginary parts, E|z|^2 = 1.
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::vector<Complex> z(k);
    for (auto &zi : z) {
      const double re = normal(rng);
      const double im = normal(rng);
      zi = {re, im};
    }
    Complex *out = amps.data() + r * k;
    const Complex *l = lower.data();
    for (std::size_t i = 0; i < k; ++i) {
      Complex acc{0.0, 0.0};
      for (std::size_t j = 0; j <= i; ++j)
        acc += l[j] * z[j];
      out[i] = acc;
      l += i + 1;
    }
  });
  return SpeckleEnsemble(cov.grid, cov.mean_t, seed, realizations, std::move(amps));
}

void write_ensemble_csv(std::ostream &out, const SpeckleEnsemble &ens) {
  out << "realization,grid_index,re,im\n";
  char buf[96];
  for (std::size_t r = 0; r < ens.realizations(); ++r) {
    for (std::size_t k = 0; k < ens.grid_size(); ++k) {
      const Complex t = ens.amplitude(r, k);
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", r, k, t.real(), t.imag());
      out << buf;
    }
  }
}

SpeckleEnsemble read_ensemble_csv(std::istream &in, std::vector<double> grid, double mean_t, std::uint64_t seed) {
  std::string line;
  if (!std::getline(in, line) || line != "realization,grid_index,re,im")
    throw DomainError("ensemble CSV: missing or unexpected header");
  const std::size_t k = grid.size();
  std::vector<Complex> amps;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::size_t r = 0, g = 0;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &r, &g, &re, &im) != 4)
      throw DomainError("ensemble CSV: malformed row '" + line + "'");
    if (r * k + g != expected || g >= k)
      throw DomainError("ensemble CSV: rows out of order at '" + line + "'");
    amps.emplace_back(re, im);
    ++expected;
  }
  if (k == 0 || amps.size() % k != 0)
    throw DomainError("ensemble CSV: incomplete final realization");
  const std::size_t realizations = amps.size() / k;
  return SpeckleEnsemble(std::move(grid), mean_t, seed, realizations, std::move(amps));
}

// ---------------------------------------------------------------------------

const MomentRecord &MomentReport::find(std::string_view name, double x) const {
  for (const auto &rec : records)
    if (rec.name == name && rec.x == x)
      return rec;
  throw std::out_of_range("no moment record '" + std::string(name) + "'");
}

namespace {

struct MeanError {
  double mean;
  double std_error;
};

// For a plain mean the delete-one jackknife error reduces to s / sqrt(n).
MeanError mean_with_error(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double a : v)
    sum += a;
  const double mean = sum / n;
  double ss = 0.0;
  for (double a : v)
    ss += (a - mean) * (a - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// Delete-one jackknife for |mean(w)|^2.
MeanError squared_modulus_of_mean(std::span<const Complex> w) {
  const double n = static_cast<double>(w.size());
  Complex sum{0.0, 0.0};
  for (const auto &a : w)
    sum += a;
  const double estimate = std::norm(sum / n);
  double loo_sum = 0.0;
  std::vector<double> loo(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    loo[i] = std::norm((sum - w[i]) / (n - 1.0));
    loo_sum += loo[i];
  }
  const double loo_mean = loo_sum / n;
  double ss = 0.0;
  for (double a : loo)
    ss += (a - loo_mean) * (a - loo_mean);
  return {estimate, std::sqrt((n - 1.0) / n * ss)};
}

MomentRecord make_record(std::string name, double x, int order, MeanError me, double theory) {
  if (!(me.std_error > 0.0))
    throw EstimationError("zero standard error for moment " + name);
  return {std::move(name), x, order, me.mean, me.std_error, theory, (me.mean - theory) / me.std_error};
}

} // namespace

MomentReport estimate_moments(const SpeckleEnsemble &ens) {
  const std::size_t n = ens.realizations();
  if (n < 100)
    throw EstimationError("moment estimation needs at least 100 realizations, got " + std::to_string(n));

  const double q = ens.mean_t();
  MomentReport report;
  report.mean_t = q;
  report.realizations = n;

  std::vector<double> t0(n);
  for (std::size_t r = 0; r < n; ++r)
    t0[r] = ens.intensity(r, 0);

  std::vector<double> buf(n);
  double factorial = 1.0;
  for (int p = 1; p <= 4; ++p) {
    factorial *= p;
    for (std::size_t r = 0; r < n; ++r)
      buf[r] = std::pow(t0[r], p);
    const std::string name = p == 1 ? "T" : "T^" + std::to_string(p);
    report.records.push_back(make_record(name, 0.0, p, mean_with_error(buf), factorial * std::pow(q, p)));
  }

  std::vector<Complex> w(n);
  for (std::size_t k = 1; k < ens.grid_size(); ++k) {
    const double x = ens.grid()[k] - ens.grid()[0];
    const double f = eval_f(NormalizedOffset(x));
    const double q2 = q * q, q3 = q2 * q, q4 = q3 * q;

    auto pair_moment = [&](auto term) {
      for (std::size_t r = 0; r < n; ++r)
        buf[r] = term(t0[r], ens.intensity(r, k));
      return mean_with_error(buf);
    };
    report.records.push_back(
        make_record("TT'", x, 2, pair_moment([](double a, double b) { return a * b; }), q2 * (1.0 + f)));
    report.records.push_back(make_record("T^2T'", x, 3, pair_moment([](double a, double b) { return a * a * b; }),
                                         2.0 * q3 * (1.0 + 2.0 * f)));
    report.records.push_back(make_record("TT'^2", x, 3, pair_moment([](double a, double b) { return a * b * b; }),
                                         2.0 * q3 * (1.0 + 2.0 * f)));
    report.records.push_back(make_record("T^2T'^2", x, 4,
                                         pair_moment([](double a, double b) { return a * a * b * b; }),
                                         4.0 * q4 * (1.0 + 4.0 * f + f * f)));

    for (std::size_t r = 0; r < n; ++r)
      w[r] = std::conj(ens.amplitude(r, 0)) * ens.amplitude(r, k);
    report.records.push_back(make_record("|t*t'|^2", x, 2, squared_modulus_of_mean(w), q2 * f));
  }
  return report;
}

// ---------------------------------------------------------------------------

std::string_view to_string(EstimationMode mode) {
  return mode == EstimationMode::counting ? "counting" : "analytic_variance";
}

VarianceTable noise_variances(const SpeckleEnsemble &ens, const NoiseSource &source, EstimationMode mode,
                              std::size_t shots, std::uint64_t seed, unsigned workers) {
  const auto *state = std::get_if<QuantumState>(&source);
  if (mode == EstimationMode::counting) {
    if (!state)
      throw UnsupportedSamplingError("counting mode needs a quantum state, not classical noise");
    if (state->kind() == StateKind::custom)
      throw UnsupportedSamplingError("counting mode is not available for custom states");
    if (shots < 2)
      throw DomainError("counting mode needs at least 2 shots per realization");
  }

  const std::size_t n = ens.realizations();
  const std::size_t k = ens.grid_size();
  VarianceTable table;
  table.realizations = n;
  table.grid_size = k;
  table.values.resize(n * k);
  std::vector<std::size_t> clamped(n, 0);

  parallel_for(n, workers, [&](std::size_t r) {
    Engine rng = substream(seed, StreamTag::counting, r);
    for (std::size_t j = 0; j < k; ++j) {
      double t = ens.intensity(r, j);
      if (t > 1.0) {
        t = 1.0;
        ++clamped[r];
      }
      const ChannelTransmission trans(t);
      double v = 0.0;
      if (mode == EstimationMode::counting) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t s = 0; s < shots; ++s) {
          const double c = static_cast<double>(draw_transmitted_count(*state, trans, rng));
          sum += c;
          sum2 += c * c;
        }
        const double ds = static_cast<double>(shots);
        const double mean = sum / ds;
        v = std::max(0.0, (sum2 - ds * mean * mean) / (ds - 1.0));
      } else if (state) {
        v = transmitted_variance_quantum(*state, trans);
      } else {
        const auto &cl = std::get<ClassicalNoise>(source);
        v = transmitted_variance_classical(cl.mean_photons, trans, cl.noise_scale);
      }
      table.values[r * k + j] = v;
    }
  });
  for (auto c : clamped)
    table.clamped += c;
  return table;
}

namespace {

struct Sums {
  std::vector<double> cross; // sum v0 vk
  std::vector<double> level; // sum vk
};

std::vector<double> correlation_from_sums(const Sums &s, double n) {
  std::vector<double> c(s.cross.size());
  const double m0 = s.level[0] / n;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double denom = m0 * (s.level[k] / n);
    if (!(denom > 0.0))
      throw EstimationError("mean variance vanishes; correlation undefined");
    c[k] = (s.cross[k] / n) / denom - 1.0;
  }
  return c;
}

template <class IndexFn>
Sums accumulate(const VarianceTable &t, std::size_t count, IndexFn index) {
  const std::size_t k = t.grid_size;
  Sums s{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  for (std::size_t i = 0; i < count; ++i) {
    const double *row = t.values.data() + index(i) * k;
    const double v0 = row[0];
    for (std::size_t j = 0; j < k; ++j) {
      s.cross[j] += v0 * row[j];
      s.level[j] += row[j];
    }
  }
  return s;
}

double sample_sd(std::span<const double> v) {
  double mean = 0.0;
  for (double a : v)
    mean += a;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double a : v)
    ss += (a - mean) * (a - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

CorrelationBatch correlate_variances(std::span<const VarianceTable *const> tables, std::span<const double> grid,
                                     const BootstrapOptions &opts,
                                     std::span<const std::pair<std::size_t, std::size_t>> differences) {
  if (tables.empty())
    throw DomainError("no variance tables to correlate");
  if (opts.resamples < 2)
    throw DomainError("bootstrap needs at least 2 resamples");
  const std::size_t n = tables.front()->realizations;
  const std::size_t k = grid.size();
  for (const auto *t : tables)
    if (t->realizations != n || t->grid_size != k)
      throw DomainError("variance tables disagree in shape");
  for (const auto &[a, b] : differences)
    if (a >= tables.size() || b >= tables.size())
      throw DomainError("difference refers to a missing table");
  if (n < 2)
    throw EstimationError("correlation estimate needs at least 2 realizations");

  const double dn = static_cast<double>(n);
  const auto identity = [](std::size_t i) { return i; };
  std::vector<std::vector<double>> full;
  for (const auto *t : tables)
    full.push_back(correlation_from_sums(accumulate(*t, n, identity), dn));

  // replicas[b][table][k]
  std::vector<std::vector<std::vector<double>>> replicas(opts.resamples);
  parallel_for(opts.resamples, opts.workers, [&](std::size_t b) {
    Engine rng = substream(opts.seed, StreamTag::bootstrap, b);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (auto &i : idx)
      i = pick(rng);
    auto &out = replicas[b];
    out.reserve(tables.size());
    for (const auto *t : tables)
      out.push_back(correlation_from_sums(accumulate(*t, n, [&](std::size_t i) { return idx[i]; }), dn));
  });

  std::vector<double> column(opts.resamples);
  auto error_of = [&](auto value_of, std::size_t j) {
    for (std::size_t b = 0; b < opts.resamples; ++b)
      column[b] = value_of(replicas[b], j);
    return sample_sd(column);
  };

  CorrelationBatch batch;
  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    CorrelationCurve curve;
    for (std::size_t j = 0; j < k; ++j)
      curve.append(grid[j], full[ti][j],
                   error_of([ti](const auto &rep, std::size_t jj) { return rep[ti][jj]; }, j));
    batch.curves.push_back(std::move(curve));
  }
  for (const auto &[a, b] : differences) {
    CorrelationCurve curve;
    for (std::size_t j = 0; j < k; ++j)
      curve.append(grid[j], full[a][j] - full[b][j],
                   error_of([a = a, b = b](const auto &rep, std::size_t jj) { return rep[a][jj] - rep[b][jj]; },
                            j));
    batch.differences.push_back(std::move(curve));
  }
  return batch;
}

namespace {

std::string describe(const NoiseSource &source) {
  if (const auto *s = std::get_if<QuantumState>(&source)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s n=%g F=%g", std::string(to_string(s->kind())).c_str(), s->mean_photons(),
                  s->fano());
    return buf;
  }
  return "classical";
}

} // namespace

NoiseCorrelationEstimate estimate_noise_correlation(const SpeckleEnsemble &ens, const NoiseSource &source,
                                                    const NoiseEstimateOptions &opts) {
  const VarianceTable table = noise_variances(ens, source, opts.mode, opts.shots, opts.seed, opts.workers);
  const VarianceTable *tables[] = {&table};
  CorrelationBatch batch =
      correlate_variances(tables, ens.grid(), {opts.bootstrap_resamples, opts.seed, opts.workers});

  CorrelationCurve curve = std::move(batch.curves.front());
  curve.label = describe(source) + " (" + std::string(to_string(opts.mode)) + ")";
  NoiseCorrelationEstimate est{std::move(curve), opts.mode, source,
                               opts.mode == EstimationMode::counting ? opts.shots : 0, table.clamped};
  return est;
}

// ---------------------------------------------------------------------------

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2)
    return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-17)
      break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

RayleighCheck rayleigh_check(const SpeckleEnsemble &ens, double significance) {
  const std::size_t n = ens.realizations();
  if (n < 1000)
    throw EstimationError("Rayleigh check needs at least 1000 realizations, got " + std::to_string(n));

  std::vector<double> t(n);
  for (std::size_t r = 0; r < n; ++r)
    t[r] = ens.intensity(r, 0);
  const MeanError me = mean_with_error(t);
  std::sort(t.begin(), t.end());

  const double q = ens.mean_t();
  const double dn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = -std::expm1(-t[i] / q);
    d = std::max({d, static_cast<double>(i + 1) / dn - cdf, cdf - static_cast<double>(i) / dn});
  }
  const double root = std::sqrt(dn);
  RayleighCheck rc;
  rc.ks_statistic = d;
  rc.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
  rc.significance = significance;
  rc.passed = rc.p_value >= significance;
  rc.fitted_mean = me.mean;
  rc.fitted_mean_stderr = me.std_error;
  rc.mean_z = me.std_error > 0.0 ? (me.mean - q) / me.std_error : 0.0;
  return rc;
}

} // namespace noisemem
