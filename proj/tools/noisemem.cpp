// Command-line front end: analytic curve tables, Monte Carlo validation
// campaigns and photon-count sampling.

#include <noisemem/curves.hpp>
#include <noisemem/errors.hpp>
#include <noisemem/validation.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

using namespace noisemem;
using namespace noisemem::cli;

namespace {

enum ExitCode : int { kOk = 0, kIoError = 1, kConfigError = 2, kDomainError = 3, kSuiteFailure = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes through `emit` to stdout for "" or "-", otherwise to the file.
void write_output(const std::string &path, const std::function<void(std::ostream &)> &emit) {
  if (path.empty() || path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path + "' for writing");
  emit(out);
  out.flush();
  if (!out)
    throw IoError("failed writing '" + path + "'");
}

void add_grid_options(CLI::App *cmd, GridSpec &grid, std::string &scale) {
  cmd->add_option("--grid-min", grid.min, "Smallest normalized offset")->capture_default_str();
  cmd->add_option("--grid-max", grid.max, "Largest normalized offset")->capture_default_str();
  cmd->add_option("--grid-points", grid.points, "Number of grid points")->capture_default_str();
  cmd->add_option("--grid-scale", scale, "Grid spacing")->check(CLI::IsMember({"lin", "log"}))->capture_default_str();
}

GridScale to_scale(const std::string &s) { return s == "lin" ? GridScale::lin : GridScale::log; }

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Quantum and classical noise correlations of multiply scattered light"};
  app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  bool show_config = false;
  app.add_flag("--show-config", show_config, "Print the effective configuration and exit")->configurable(false);

  // curves
  auto *curves = app.add_subcommand("curves", "Emit analytic correlation curves as CSV or JSON");
  int figure = 1;
  GridSpec curve_grid;
  std::string curve_scale = "log";
  std::vector<double> curve_fanos{0.0, 1.0, 2.0};
  std::vector<double> l_over_ell{3.0, 4.0, 5.0};
  double curve_mean_t = 0.01;
  std::string curve_out = "-";
  std::string curve_format = "csv";
  curves->add_option("--figure", figure, "1: shot vs classical noise, 2: second-order term C_II/T")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  add_grid_options(curves, curve_grid, curve_scale);
  curves->add_option("--fano", curve_fanos, "Fano factors (figure 2)")->delimiter(',')->capture_default_str();
  curves->add_option("--l-over-ell", l_over_ell, "Thickness over mean free path (figure 2)")
      ->delimiter(',')
      ->capture_default_str();
  curves->add_option("--mean-t", curve_mean_t, "Mean transmission (curves are normalized and do not depend on it)")
      ->capture_default_str();
  curves->add_option("--out", curve_out, "Output path, '-' for stdout")->capture_default_str();
  curves->add_option("--format", curve_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // validate
  auto *validate = app.add_subcommand("validate", "Run the Monte Carlo validation campaign");
  ValidateConfig vcfg;
  std::string val_scale = "log";
  std::uint64_t val_seed = 0;
  std::string val_out = "-";
  std::string val_format = "json";
  add_grid_options(validate, vcfg.grid, val_scale);
  validate->add_option("--fano", vcfg.fanos, "Fano factors for the quantum curves")
      ->delimiter(',')
      ->capture_default_str();
  validate->add_option("--mean-t", vcfg.mean_t, "Mean transmission")->capture_default_str();
  validate->add_option("--realizations", vcfg.realizations, "Disorder realizations")->capture_default_str();
  validate->add_option("--shots", vcfg.shots, "Shots per realization in counting mode")->capture_default_str();
  auto *val_seed_opt = validate->add_option("--seed", val_seed, "Master seed (required)");
  validate->add_option("--workers", vcfg.workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  validate->add_option("--bootstrap", vcfg.bootstrap_resamples, "Bootstrap resamples")->capture_default_str();
  validate->add_option("--out", val_out, "Report path, '-' for stdout")->capture_default_str();
  validate->add_option("--format", val_format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // sample-stats
  auto *sample = app.add_subcommand("sample-stats", "Draw transmitted photon counts and summarize them");
  SampleStatsConfig scfg;
  std::string state_name = "coherent";
  std::string sample_out = "-";
  std::string summary_out;
  std::string sample_format = "csv";
  auto *sample_seed_opt = sample->add_option("--seed", scfg.seed, "Seed (required)");
  sample->add_option("--state", state_name, "Input state")
      ->check(CLI::IsMember({"fock", "coherent", "thermal", "custom"}))
      ->capture_default_str();
  sample->add_option("--mean-photons", scfg.mean_photons, "Mean photon number (integer for Fock)")
      ->capture_default_str();
  sample->add_option("--transmission", scfg.transmission, "Channel transmission T")->capture_default_str();
  sample->add_option("--shots", scfg.shots, "Number of counts")->capture_default_str();
  sample->add_option("--out", sample_out, "Counts path, '-' for stdout")->capture_default_str();
  sample->add_option("--summary", summary_out, "Summary CSV path (default: <out>.summary.csv)");
  sample->add_option("--format", sample_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  if (show_config) {
    std::cout << app.config_to_str(true, true);
    return kOk;
  }

  try {
    if (*curves) {
      curve_grid.scale = to_scale(curve_scale);
      const CurveTable table =
          figure == 1 ? shot_vs_classical_table(curve_grid) : second_order_table(curve_grid, curve_fanos, l_over_ell);
      write_output(curve_out, [&](std::ostream &out) {
        if (curve_format == "json")
          out << to_json(table).dump(2) << '\n';
        else
          write_csv(out, table);
      });
      return kOk;
    }

    if (*validate) {
      if (val_format != "json")
        throw ConfigError("validation reports are JSON only");
      if (val_seed_opt->count() == 0)
        throw ConfigError("validate requires --seed");
      vcfg.grid.scale = to_scale(val_scale);
      vcfg.seed = val_seed;
      const ValidationResult result = run_validation(vcfg);
      write_output(val_out, [&](std::ostream &out) { out << dump_report(result.report); });
      return result.passed ? kOk : kSuiteFailure;
    }

    if (*sample) {
      if (sample_seed_opt->count() == 0)
        throw ConfigError("sample-stats requires --seed");
      scfg.kind = parse_state_kind(state_name);
      const SampleStatsResult res = run_sample_stats(scfg);
      const auto &s = res.summary;
      if (sample_format == "json") {
        nlohmann::ordered_json j;
        j["state"] = state_name;
        j["mean_photons"] = scfg.mean_photons;
        j["transmission"] = scfg.transmission;
        j["shots"] = s.shots;
        j["mean"] = s.mean;
        j["variance"] = s.variance;
        j["fano"] = s.fano;
        j["fano_stderr"] = s.fano_stderr;
        j["expected_fano"] = res.expected_fano;
        j["fano_z"] = res.fano_z;
        j["counts"] = res.counts;
        write_output(sample_out, [&](std::ostream &out) { out << j.dump(2) << '\n'; });
        return kOk;
      }
      write_output(sample_out, [&](std::ostream &out) {
        out << "shot,count\n";
        for (std::size_t i = 0; i < res.counts.size(); ++i)
          out << i << ',' << res.counts[i] << '\n';
      });
      const std::string summary_path =
          !summary_out.empty() ? summary_out : (sample_out == "-" ? std::string("-") : sample_out + ".summary.csv");
      write_output(summary_path, [&](std::ostream &out) {
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "state,mean_photons,transmission,shots,mean,variance,fano,fano_stderr,expected_fano,fano_z\n"
                      "%s,%.17g,%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      state_name.c_str(), scfg.mean_photons, scfg.transmission, s.shots, s.mean, s.variance, s.fano,
                      s.fano_stderr, res.expected_fano, res.fano_z);
        out << buf;
      });
      return kOk;
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError &e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const DomainError &e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const UnsupportedSamplingError &e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
