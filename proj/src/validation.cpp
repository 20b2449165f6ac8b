#include <noisemem/analytics.hpp>
#include <noisemem/ensemble.hpp>
#include <noisemem/errors.hpp>
#include <noisemem/substream.hpp>
#include <noisemem/validation.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace noisemem::cli {

using json = nlohmann::ordered_json;

namespace {

// Per-suite seeds so ensembles of different suites are independent.
enum class SuiteSeed : std::uint64_t { moments = 1, curves = 2, counting = 3, samplers = 4, bootstrap = 5 };

std::uint64_t suite_seed(std::uint64_t master, SuiteSeed which) {
  return mix64(master ^ (0x5eed0000ULL + static_cast<std::uint64_t>(which)));
}

json zcheck(std::string name, std::optional<double> x, double empirical, double std_error, double theory,
            double limit) {
  double z = 0.0;
  if (std_error > 0.0)
    z = (empirical - theory) / std_error;
  else if (std::abs(empirical - theory) > 1e-12)
    z = std::numeric_limits<double>::infinity();
  json c;
  c["name"] = std::move(name);
  if (x)
    c["x"] = *x;
  c["empirical"] = empirical;
  c["std_error"] = std_error;
  c["theory"] = theory;
  c["z"] = std::isfinite(z) ? json(z) : json("inf");
  c["limit"] = limit;
  c["passed"] = std::abs(z) <= limit;
  return c;
}

class ReportBuilder {
public:
  void suite(const std::string &name, const std::function<void(json &)> &body) {
    json s;
    s["name"] = name;
    json checks = json::array();
    try {
      body(checks);
    } catch (const Error &e) {
      s["error"] = e.what();
    }
    bool ok = !s.contains("error");
    for (const auto &c : checks)
      ok = ok && c["passed"].get<bool>();
    s["passed"] = ok;
    s["checks"] = std::move(checks);
    all_passed_ = all_passed_ && ok;
    suites_.push_back(std::move(s));
  }

  json suites() const { return suites_; }
  bool passed() const { return all_passed_; }

private:
  json suites_ = json::array();
  bool all_passed_ = true;
};

std::vector<double> curve_grid(const GridSpec &spec) {
  std::vector<double> xs = make_grid(spec);
  if (xs.front() > 0.0)
    xs.insert(xs.begin(), 0.0);
  return xs;
}

json config_json(const ValidateConfig &c) {
  json j;
  j["grid_min"] = c.grid.min;
  j["grid_max"] = c.grid.max;
  j["grid_points"] = c.grid.points;
  j["grid_scale"] = c.grid.scale == GridScale::log ? "log" : "lin";
  j["fano"] = c.fanos;
  j["mean_t"] = c.mean_t;
  j["realizations"] = c.realizations;
  j["shots"] = c.shots;
  j["seed"] = *c.seed;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  return j;
}

} // namespace

ValidationResult run_validation(const ValidateConfig &config) {
  if (!config.seed)
    throw DomainError("validate requires an explicit --seed");
  if (!std::isfinite(config.mean_t) || config.mean_t <= 0.0 || config.mean_t > 1.0)
    throw DomainError("mean transmission must lie in (0, 1]");
  for (double f : config.fanos)
    if (!std::isfinite(f) || f < 0.0)
      throw DomainError("Fano factors must be >= 0");
  if (config.realizations < 1)
    throw DomainError("need at least one realization");

  const std::uint64_t seed = *config.seed;
  const double q = config.mean_t;
  const unsigned workers = std::max(1u, config.workers);
  const std::vector<double> grid = curve_grid(config.grid);
  ReportBuilder rb;

  // Gaussian moment theorem, intensity law and the mesoscopic negative control
  // share one ensemble on the moment grid.
  std::optional<SpeckleEnsemble> moment_ens;
  std::optional<MomentReport> moments;
  rb.suite("gaussian_moments", [&](json &checks) {
    const auto cov = build_field_covariance(kMomentGrid, q);
    moment_ens = generate_ensemble(cov, config.realizations, suite_seed(seed, SuiteSeed::moments), workers);
    moments = estimate_moments(*moment_ens);
    for (const auto &rec : moments->records)
      checks.push_back(zcheck(rec.name, rec.x, rec.empirical, rec.std_error, rec.theory, 5.0));
  });

  rb.suite("rayleigh_intensity", [&](json &checks) {
    if (!moment_ens)
      throw EstimationError("no ensemble available");
    const RayleighCheck rc = rayleigh_check(*moment_ens, 0.01);
    json c;
    c["name"] = "ks_exponential";
    c["statistic"] = rc.ks_statistic;
    c["p_value"] = rc.p_value;
    c["significance"] = rc.significance;
    c["passed"] = rc.passed;
    checks.push_back(std::move(c));
    checks.push_back(zcheck("fitted_mean", std::nullopt, rc.fitted_mean, rc.fitted_mean_stderr, q, 5.0));
  });

  rb.suite("negative_control_mesoscopic", [&](json &checks) {
    if (!moments)
      throw EstimationError("no moment report available");
    const auto geom = DiffusionGeometry::from_ratio(3.0);
    for (const auto &rec : moments->records) {
      if (rec.name != "TT'" || rec.x <= 0.0)
        continue;
      json c = zcheck("TT' minus Gaussian", rec.x, rec.empirical - rec.theory, rec.std_error, 0.0, 3.0);
      const double g_term = mesoscopic_product_moment(NormalizedOffset(rec.x), q, geom) - rec.theory;
      c["g_term_l_over_ell_3"] = g_term;
      checks.push_back(std::move(c));
    }
  });

  // Curve suites: every table is resampled with the same bootstrap indices.
  rb.suite("noise_correlation_curves", [&](json &checks) {
    const auto cov = build_field_covariance(grid, q);
    const SpeckleEnsemble ens =
        generate_ensemble(cov, config.realizations, suite_seed(seed, SuiteSeed::curves), workers);
    const std::uint64_t vseed = suite_seed(seed, SuiteSeed::curves);

    std::vector<VarianceTable> tables;
    tables.push_back(noise_variances(ens, QuantumState::coherent(1.0), EstimationMode::analytic_variance, 0, vseed,
                                     workers));
    tables.push_back(noise_variances(ens, ClassicalNoise{1.0, 1.0}, EstimationMode::analytic_variance, 0, vseed,
                                     workers));
    tables.push_back(noise_variances(ens, ClassicalNoise{1.0, 7.3}, EstimationMode::analytic_variance, 0, vseed,
                                     workers));
    std::vector<std::pair<std::size_t, std::size_t>> diffs;
    for (double f : config.fanos) {
      tables.push_back(noise_variances(ens, QuantumState::custom(1.0, f), EstimationMode::analytic_variance, 0,
                                       vseed, workers));
      diffs.emplace_back(tables.size() - 1, 0);
    }
    std::vector<const VarianceTable *> ptrs;
    std::size_t clamped = 0;
    for (const auto &t : tables) {
      ptrs.push_back(&t);
      clamped += t.clamped;
    }
    const CorrelationBatch batch = correlate_variances(
        ptrs, grid, {config.bootstrap_resamples, suite_seed(seed, SuiteSeed::bootstrap), workers}, diffs);

    const auto &sn = batch.curves[0];
    const auto &cn = batch.curves[1];
    const auto &cn_scaled = batch.curves[2];
    for (const auto &p : sn.points)
      checks.push_back(zcheck("shot_noise", p.x, p.value, *p.std_error, corr_shot_noise(NormalizedOffset(p.x)), 3.0));
    for (const auto &p : cn.points)
      checks.push_back(
          zcheck("classical_noise", p.x, p.value, *p.std_error, corr_classical_noise(NormalizedOffset(p.x)), 3.0));
    if (cn.points.front().x == 0.0) {
      const auto &p0 = cn.points.front();
      checks.push_back(zcheck("classical_factor_five", 0.0, p0.value, *p0.std_error, 5.0, 3.0));
    }

    double max_dev = 0.0;
    for (std::size_t k = 0; k < cn.points.size(); ++k)
      max_dev = std::max(max_dev, std::abs(cn.points[k].value - cn_scaled.points[k].value));
    json inv;
    inv["name"] = "classical_noise_scale_invariance";
    inv["noise_scales"] = {1.0, 7.3};
    inv["max_abs_difference"] = max_dev;
    inv["limit"] = 1e-12;
    inv["passed"] = max_dev <= 1e-12;
    checks.push_back(std::move(inv));

    for (std::size_t i = 0; i < config.fanos.size(); ++i) {
      const double fano = config.fanos[i];
      const auto &curve = batch.curves[3 + i];
      const auto &diff = batch.differences[i];
      char name[64];
      std::snprintf(name, sizeof name, "quantum_fano_%g", fano);
      char dname[64];
      std::snprintf(dname, sizeof dname, "quantum_fano_%g_minus_coherent", fano);
      for (std::size_t k = 0; k < curve.points.size(); ++k) {
        const NormalizedOffset x(curve.points[k].x);
        const double full = corr_quantum_full(x, fano, q);
        checks.push_back(zcheck(name, x.value(), curve.points[k].value, *curve.points[k].std_error, full, 3.0));
        checks.push_back(zcheck(dname, x.value(), diff.points[k].value, *diff.points[k].std_error,
                                full - corr_shot_noise(x), 3.0));
      }
    }

    json cl;
    cl["name"] = "clamped_transmissions";
    cl["count"] = clamped;
    cl["passed"] = true;
    checks.push_back(std::move(cl));
  });

  rb.suite("counting_mode", [&](json &checks) {
    const std::size_t n = std::min(config.realizations, kCountingRealizations);
    const auto cov = build_field_covariance(kCountingGrid, q);
    const std::uint64_t cseed = suite_seed(seed, SuiteSeed::counting);
    const SpeckleEnsemble ens = generate_ensemble(cov, n, cseed, workers);
    // Ten transmitted photons on average per realization.
    const QuantumState state = QuantumState::coherent(10.0 / q);
    const VarianceTable counted = noise_variances(ens, state, EstimationMode::counting, config.shots, cseed, workers);
    const VarianceTable analytic =
        noise_variances(ens, state, EstimationMode::analytic_variance, 0, cseed, workers);
    const VarianceTable *ptrs[] = {&counted, &analytic};
    const CorrelationBatch batch = correlate_variances(
        ptrs, kCountingGrid, {config.bootstrap_resamples, suite_seed(cseed, SuiteSeed::bootstrap), workers});
    const auto &c = batch.curves[0];
    const auto &a = batch.curves[1];
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      const double x = c.points[k].x;
      const double se = std::hypot(*c.points[k].std_error, *a.points[k].std_error);
      checks.push_back(zcheck("counting_vs_analytic", x, c.points[k].value, se, a.points[k].value, 3.0));
      checks.push_back(
          zcheck("counting_vs_f", x, c.points[k].value, *c.points[k].std_error, eval_f(NormalizedOffset(x)), 3.0));
    }
  });

  rb.suite("photon_samplers", [&](json &checks) {
    const QuantumState states[] = {QuantumState::fock(10), QuantumState::coherent(10.0), QuantumState::thermal(1.0)};
    const double transmissions[] = {0.1, 0.5, 0.9};
    const std::uint64_t sseed = suite_seed(seed, SuiteSeed::samplers);
    std::uint64_t index = 0;
    for (const auto &state : states) {
      for (double t : transmissions) {
        Engine rng = substream(sseed, StreamTag::sampler, index++);
        const ChannelTransmission trans(t);
        const auto counts = sample_transmitted_counts(state, trans, kSamplerShots, rng);
        const CountSummary s = summarize_counts(counts);
        char name[64];
        std::snprintf(name, sizeof name, "%s_n%g_T%g", std::string(to_string(state.kind())).c_str(),
                      state.mean_photons(), t);
        const double mean = state.mean_photons() * t;
        const double var = transmitted_variance_quantum(state, trans);
        checks.push_back(zcheck(std::string(name) + "_mean", std::nullopt, s.mean, s.mean_stderr, mean, 5.0));
        checks.push_back(
            zcheck(std::string(name) + "_variance", std::nullopt, s.variance, s.variance_stderr, var, 5.0));
        checks.push_back(zcheck(std::string(name) + "_fano", std::nullopt, s.fano, s.fano_stderr, var / mean, 5.0));
      }
    }
  });

  ValidationResult result;
  result.report["config"] = config_json(config);
  result.report["suites"] = rb.suites();
  result.report["passed"] = rb.passed();
  result.passed = rb.passed();
  return result;
}

std::string dump_report(const json &report) { return report.dump(2) + "\n"; }

QuantumState make_state(StateKind kind, double mean_photons) {
  switch (kind) {
  case StateKind::fock:
    if (!(mean_photons >= 0.0) || std::floor(mean_photons) != mean_photons)
      throw DomainError("Fock states need a non-negative integer photon number");
    return QuantumState::fock(static_cast<std::uint64_t>(mean_photons));
  case StateKind::coherent:
    return QuantumState::coherent(mean_photons);
  case StateKind::thermal:
    return QuantumState::thermal(mean_photons);
  case StateKind::custom:
    break;
  }
  throw UnsupportedSamplingError("custom states have no canonical photon-count law");
}

SampleStatsResult run_sample_stats(const SampleStatsConfig &config) {
  const QuantumState state = make_state(config.kind, config.mean_photons);
  const ChannelTransmission trans(config.transmission);
  Engine rng = substream(config.seed, StreamTag::sampler, 0);
  SampleStatsResult res;
  res.counts = sample_transmitted_counts(state, trans, config.shots, rng);
  res.summary = summarize_counts(res.counts);
  res.expected_fano = 1.0 + (state.fano() - 1.0) * trans.value();
  res.fano_z = res.summary.fano_stderr > 0.0 ? (res.summary.fano - res.expected_fano) / res.summary.fano_stderr : 0.0;
  return res;
}

} // namespace noisemem::cli
