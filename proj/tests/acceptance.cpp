// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances and sample sizes are fixed here.

#include <noisemem/analytics.hpp>
#include <noisemem/curves.hpp>
#include <noisemem/ensemble.hpp>
#include <noisemem/photon_stats.hpp>
#include <noisemem/validation.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace noisemem;
using namespace noisemem::cli;

namespace {

constexpr std::uint64_t kSeed = 20051;
constexpr std::size_t kRealizations = 100000;
constexpr double kMeanT = 0.01;

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string &title, double budget_s, const std::function<Outcome()> &body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out = body();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0)
    out.require(elapsed < budget_s, fmt("runtime %.2f s exceeds %.0f s", elapsed, budget_s));
  failures += !out.passed;
  std::printf("[%s] %d. %s (%.2f s)%s%s\n", out.passed ? "PASS" : "FAIL", id, title.c_str(), elapsed,
              out.detail.empty() ? "" : " :: ", out.detail.c_str());
  std::fflush(stdout);
}

std::optional<MomentReport> g_moments;

const MomentReport &moments() {
  if (!g_moments) {
    const auto cov = build_field_covariance(kMomentGrid, kMeanT);
    g_moments = estimate_moments(generate_ensemble(cov, kRealizations, kSeed));
  }
  return *g_moments;
}

} // namespace

int main() {
  criterion(1, "figure 1 anchors C_SN(0) = 1, C_CN(0) = 5; C_CN = C_SN^2 + 4 C_SN", 1.0, [] {
    Outcome o;
    std::stringstream csv;
    write_csv(csv, shot_vs_classical_table(GridSpec{}));
    const CurveTable t = read_csv(csv);
    o.require(t.rows.front()[0] == 0.0, "first row is not x = 0");
    o.require(std::abs(t.rows.front()[1] - 1.0) <= 1e-9, fmt("C_SN(0) = %.17g", t.rows.front()[1]));
    o.require(std::abs(t.rows.front()[2] - 5.0) <= 1e-9, fmt("C_CN(0) = %.17g", t.rows.front()[2]));
    double worst = 0.0;
    for (const auto &r : t.rows)
      worst = std::max(worst, std::abs(r[2] - (r[1] * r[1] + 4.0 * r[1])));
    o.require(worst <= 1e-12, fmt("identity violated by %.3g", worst));
    if (o.passed)
      o.detail = fmt("%.0f rows, max identity deviation %.2g", static_cast<double>(t.rows.size()), worst);
    return o;
  });

  criterion(2, "first-order residual shrinks quadratically (ratio in [80, 120])", 1.0, [] {
    Outcome o;
    std::string ratios;
    for (double fano : {0.0, 2.0}) {
      for (double xv : {0.5, 4.0, 16.0}) {
        const NormalizedOffset x(xv);
        const double f = eval_f(x);
        auto residual = [&](double q) { return std::abs(corr_quantum_full(x, fano, q) - f - 4.0 * (fano - 1.0) * f * q); };
        const double r1 = residual(1e-2) / residual(1e-3);
        const double r2 = residual(1e-3) / residual(1e-4);
        const bool ok = r1 >= 80.0 && r1 <= 120.0 && r2 >= 80.0 && r2 <= 120.0;
        ratios += fmt("F=%g x=%g: %.1f, %.1f", fano, xv, r1, r2) + (ok ? "; " : " (out of range); ");
        if (!ok)
          o.passed = false;
      }
    }
    o.detail = ratios;
    return o;
  });

  criterion(3, "Gaussian moment theorem within 5 standard errors at R = 1e5", 60.0, [] {
    Outcome o;
    double worst = 0.0;
    for (const auto &rec : moments().records) {
      worst = std::max(worst, std::abs(rec.z));
      o.require(std::abs(rec.z) <= 5.0, rec.name + fmt(" at x=%g: z=%.2f", rec.x, rec.z));
    }
    const auto &t3 = moments().find("T^3", 0.0);
    if (o.passed)
      o.detail = fmt("%.0f moments, max |z| = %.2f, <T^3>/T^3 = %.3f", static_cast<double>(moments().records.size()),
                     worst, t3.empirical / std::pow(kMeanT, 3));
    return o;
  });

  criterion(4, "MC shot-noise and classical curves within 3 sigma of f and f^2 + 4f", 60.0, [] {
    Outcome o;
    std::vector<double> grid = make_grid(GridSpec{});
    grid.insert(grid.begin(), 0.0);
    const auto ens = generate_ensemble(build_field_covariance(grid, kMeanT), kRealizations, kSeed + 1);
    const auto sn = noise_variances(ens, QuantumState::coherent(1.0), EstimationMode::analytic_variance, 0, kSeed);
    const auto cn = noise_variances(ens, ClassicalNoise{}, EstimationMode::analytic_variance, 0, kSeed);
    const VarianceTable *tables[] = {&sn, &cn};
    const auto batch = correlate_variances(tables, grid, {200, kSeed, 1});
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const NormalizedOffset x(grid[k]);
      const auto &ps = batch.curves[0].points[k];
      const auto &pc = batch.curves[1].points[k];
      const double zs = (ps.value - corr_shot_noise(x)) / *ps.std_error;
      const double zc = (pc.value - corr_classical_noise(x)) / *pc.std_error;
      worst = std::max({worst, std::abs(zs), std::abs(zc)});
      o.require(std::abs(zs) <= 3.0, fmt("shot noise x=%g z=%.2f", grid[k], zs));
      o.require(std::abs(zc) <= 3.0, fmt("classical x=%g z=%.2f", grid[k], zc));
    }
    const auto &c0 = batch.curves[1].points.front();
    o.require(std::abs(c0.value - 5.0) <= 3.0 * *c0.std_error, fmt("classical x=0: %.3f +- %.3f", c0.value, *c0.std_error));
    if (o.passed)
      o.detail = fmt("%.0f points, max |z| = %.2f, C_CN(0) = %.3f +- %.3f", static_cast<double>(grid.size()), worst,
                     c0.value, *c0.std_error);
    return o;
  });

  criterion(5, "photon samplers reproduce the transmitted Fano factor within 5 sigma", 30.0, [] {
    Outcome o;
    double worst = 0.0;
    std::uint64_t index = 0;
    for (const auto &state : {QuantumState::fock(10), QuantumState::coherent(10.0), QuantumState::thermal(1.0)}) {
      for (double tv : {0.1, 0.5, 0.9}) {
        Engine rng = substream(kSeed, StreamTag::sampler, index++);
        const ChannelTransmission t(tv);
        const CountSummary s = summarize_counts(sample_transmitted_counts(state, t, 1000000, rng));
        const double expected = transmitted_variance_quantum(state, t) / (state.mean_photons() * tv);
        const double z = (s.fano - expected) / s.fano_stderr;
        worst = std::max(worst, std::abs(z));
        o.require(std::abs(z) <= 5.0, std::string(to_string(state.kind())) + fmt(" T=%g z=%.2f", tv, z));
      }
    }
    if (o.passed)
      o.detail = fmt("9 cases, max |z| = %.2f", worst);
    return o;
  });

  criterion(6, "second-order curves: sign, symmetry, L/ell monotonicity, divergence", 1.0, [] {
    Outcome o;
    const double fanos[] = {0.0, 1.0, 2.0};
    const double ratios[] = {3.0, 4.0, 5.0};
    std::stringstream csv;
    write_csv(csv, second_order_table(GridSpec{}, fanos, ratios));
    const CurveTable t = read_csv(csv);
    double asym = 0.0;
    for (const auto &row : t.rows) {
      const NormalizedOffset x(row[0]);
      const double g = eval_g(x);
      double prev_classical = -INFINITY;
      for (std::size_t r = 0; r < 3; ++r) {
        const double classical = 1.5 * ratios[r] * ratios[r] * g;
        for (std::size_t fi = 0; fi < 3; ++fi) {
          const double c2 = row[1 + fi * 3 + r];
          const double diff = c2 - classical;
          const int sign_diff = (diff > 0.0) - (diff < 0.0);
          const int sign_fano = (fanos[fi] > 1.0) - (fanos[fi] < 1.0);
          o.require(sign_diff == sign_fano, fmt("sign mismatch at x=%g F=%g", row[0], fanos[fi]));
        }
        const double fock = row[1 + r], coherent = row[4 + r], thermal = row[7 + r];
        asym = std::max(asym, std::abs(fock + thermal - 2.0 * coherent));
        o.require(coherent > prev_classical, fmt("classical term not increasing in L/ell at x=%g", row[0]));
        prev_classical = coherent;
      }
    }
    o.require(asym <= 1e-12, fmt("Fock/thermal asymmetry %.3g", asym));
    const double g_small = eval_g(NormalizedOffset(1e-6));
    o.require(g_small > 100.0, fmt("g(1e-6) = %.3f", g_small));
    if (o.passed)
      o.detail = fmt("max asymmetry %.2g, g(1e-6) = %.3f", asym, g_small);
    return o;
  });

  criterion(7, "negative control: Gaussian MC shows no mesoscopic g-term (|z| <= 3)", 60.0, [] {
    Outcome o;
    double worst = 0.0;
    for (const auto &rec : moments().records) {
      if (rec.name != "TT'")
        continue;
      worst = std::max(worst, std::abs(rec.z));
      o.require(std::abs(rec.z) <= 3.0, fmt("x=%g z=%.2f", rec.x, rec.z));
    }
    if (o.passed)
      o.detail = fmt("max |z| of <TT'> residual = %.2f", worst);
    return o;
  });

  criterion(8, "validate reports are byte-identical for 1 and 2 workers", 0.0, [] {
    Outcome o;
    ValidateConfig cfg;
    cfg.seed = kSeed;
    cfg.workers = 1;
    const auto one = run_validation(cfg);
    cfg.workers = 2;
    const auto two = run_validation(cfg);
    const std::string a = dump_report(one.report), b = dump_report(two.report);
    o.require(a == b, "reports differ");
    o.detail = fmt("%.0f bytes, campaign ", static_cast<double>(a.size())) + (one.passed ? "passed" : "FAILED");
    return o;
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
