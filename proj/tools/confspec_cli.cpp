// confspec: estimate confounding strength from CSV data, run simulation
// sweeps, convert between beta and gamma, and run the invariant suites.
//
// Exit codes: 0 success, 2 input error, 3 numerical error, 4 verification
// failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "confspec/dataset_io.hpp"
#include "confspec/error.hpp"
#include "confspec/estimator.hpp"
#include "confspec/simd.hpp"
#include "confspec/simulate.hpp"
#include "confspec/stats.hpp"
#include "confspec/transforms.hpp"
#include "confspec/verify.hpp"

namespace {

using namespace confspec;
using nlohmann::json;

constexpr int kVerificationFailure = 4;
constexpr double kRoundtripTolerance = 1e-8;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text(path, text);
  }
}

char delimiter_from(const std::string& text) {
  if (text == "\\t" || text == "tab") return '\t';
  if (text.size() != 1) fail(ErrorKind::InvalidInput, "delimiter must be a single character");
  return text[0];
}

struct SimulateArgs {
  std::vector<long> dims{5};
  std::vector<long> sizes{1000};
  int reps = 100;
  std::uint64_t seed = 1;
  int beta_steps = 101;
  int eta_steps = 101;
  double sigma_factor = 0.2;
  unsigned threads = 0;
  std::uint64_t permutations = 0;
  std::string out;
  std::string summary;
  std::string export_dir;
};

int run_simulate(const SimulateArgs& a) {
  sim::SimulationConfig cfg;
  cfg.dims.assign(a.dims.begin(), a.dims.end());
  cfg.sizes.assign(a.sizes.begin(), a.sizes.end());
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.grid.beta_steps = a.beta_steps;
  cfg.grid.eta_steps = a.eta_steps;
  cfg.grid.sigma_factor = a.sigma_factor;
  cfg.threads = a.threads > 0 ? a.threads : stats::default_threads();
  cfg.permutations = a.permutations;

  const auto result = sim::run_simulation(cfg);
  if (!a.out.empty()) {
    std::ostringstream os;
    sim::write_records_csv(result.records, os);
    emit(os.str(), a.out);
  }
  emit(sim::summary_json(result, cfg).dump(2) + "\n", a.summary);

  if (!a.export_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(a.export_dir, ec);
    if (ec) fail(ErrorKind::IoError, a.export_dir + ": " + ec.message());
    for (const auto& r : result.records) {
      const auto draw = sim::draw_replication(r.d, r.n, r.seed);
      const auto name = "d" + std::to_string(r.d) + "_n" + std::to_string(r.n) + "_rep" +
                        std::to_string(r.rep) + ".csv";
      io::write_dataset_csv(draw.data, std::filesystem::path(a.export_dir) / name);
    }
  }
  return 0;
}

struct EstimateArgs {
  std::string input;
  std::string target = "y";
  std::vector<std::string> drop;
  std::string delimiter = ",";
  std::string confounder;
  bool normalize = false;
  double sigma_factor = 0.2;
  int beta_steps = 101;
  int eta_steps = 101;
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  const auto table = io::read_csv(a.input, delimiter_from(a.delimiter));
  io::ColumnSelection sel;
  sel.target = a.target;
  sel.drop = a.drop;
  if (!a.confounder.empty()) sel.confounder = a.confounder;
  const auto selected = io::select_dataset(table, sel);

  estimator::GridConfig grid;
  grid.beta_steps = a.beta_steps;
  grid.eta_steps = a.eta_steps;
  grid.sigma_factor = a.sigma_factor;
  grid.normalize = a.normalize;
  const auto est = estimator::estimate_from_data(selected.dataset, grid);

  json doc = io::to_json(est);
  doc["config"] = {{"input", a.input},
                   {"target", selected.target_name},
                   {"predictors", selected.predictor_names},
                   {"rows", selected.dataset.x.rows()},
                   {"normalize", a.normalize},
                   {"sigma_factor", a.sigma_factor},
                   {"beta_steps", a.beta_steps},
                   {"eta_steps", a.eta_steps}};
  if (selected.dataset.z) doc["beta_prime"] = scm::beta_prime(selected.dataset);
  emit(doc.dump(2) + "\n", a.out);
  return 0;
}

struct ConvertArgs {
  std::optional<double> gamma;
  std::optional<double> beta;
  transforms::SpectralMoments moments;
  bool roundtrip = false;
};

int run_convert(const ConvertArgs& a) {
  const auto& m = a.moments;
  json doc;
  doc["moments"] = {{"m_minus1", m.m_minus1},
                    {"m_minus2", m.m_minus2},
                    {"norm_sxy_sq", m.norm_sxy_sq},
                    {"norm_ahat_sq", m.norm_ahat_sq}};
  std::vector<std::string> warnings;
  bool ok = true;
  if (a.gamma) {
    const auto beta = transforms::gamma_to_beta(*a.gamma, m);
    doc["gamma"] = *a.gamma;
    doc["beta"] = beta.value;
    if (!beta.warning.empty()) warnings.push_back(beta.warning);
    if (a.roundtrip) {
      const auto back = transforms::beta_to_gamma(beta.value, m);
      ok = std::fabs(back.value - *a.gamma) <= kRoundtripTolerance;
      doc["roundtrip"] = back.value;
      doc["roundtrip_ok"] = ok;
    }
  } else {
    const auto gamma = transforms::beta_to_gamma(*a.beta, m);
    doc["beta"] = *a.beta;
    doc["gamma"] = gamma.value;
    if (!gamma.warning.empty()) warnings.push_back(gamma.warning);
    if (a.roundtrip) {
      const auto back = transforms::gamma_to_beta(gamma.value, m);
      ok = std::fabs(back.value - *a.beta) <= kRoundtripTolerance;
      doc["roundtrip"] = back.value;
      doc["roundtrip_ok"] = ok;
    }
  }
  doc["warnings"] = warnings;
  std::cout << doc.dump(2) << "\n";
  return ok ? 0 : kVerificationFailure;
}

struct VerifyArgs {
  std::string size = "small";
  std::uint64_t seed = verify::VerifyOptions{}.seed;
  double eigen_tol = verify::VerifyOptions{}.eigen_tolerance;
  double identity_tol = verify::VerifyOptions{}.identity_tolerance;
};

int run_verify(const VerifyArgs& a) {
  verify::VerifyOptions opts;
  opts.size = a.size == "full" ? verify::Size::Full : verify::Size::Small;
  opts.seed = a.seed;
  opts.eigen_tolerance = a.eigen_tol;
  opts.identity_tolerance = a.identity_tol;
  const auto results = verify::run_verification(opts);
  std::cout << verify::format_report(results);
  return verify::all_passed(results) ? 0 : kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimate the strength of unobserved confounding from the spectrum of Sigma_XX"};
  app.require_subcommand(1);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Replicated simulation sweep over (d, n) cells");
  simulate->add_option("--d", sa.dims, "Dimensions")->delimiter(',')->check(CLI::PositiveNumber);
  simulate->add_option("--n", sa.sizes, "Sample sizes")->delimiter(',')->check(CLI::PositiveNumber);
  simulate->add_option("--reps", sa.reps, "Replications per cell")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed, "Root seed");
  simulate->add_option("--beta-steps", sa.beta_steps, "Grid points for beta")->check(CLI::Range(2, 100000));
  simulate->add_option("--eta-steps", sa.eta_steps, "Grid points for eta")->check(CLI::Range(2, 100000));
  simulate->add_option("--sigma-factor", sa.sigma_factor, "Kernel width relative to the spectral range")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--threads", sa.threads, "Worker threads (default: CONFSPEC_THREADS or logical cores)");
  simulate->add_option("--permutations", sa.permutations, "Permutations for the correlation test (0 skips)");
  simulate->add_option("--out", sa.out, "Records CSV path");
  simulate->add_option("--summary", sa.summary, "Summary JSON path (default: stdout)");
  simulate->add_option("--export-dir", sa.export_dir, "Directory for per-replication dataset CSVs");

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "Estimate beta from a CSV file");
  estimate->add_option("--input", ea.input, "CSV path")->required();
  estimate->add_option("--target", ea.target, "Target column (name or zero-based index)");
  estimate->add_option("--drop", ea.drop, "Columns to exclude from the predictors")->delimiter(',');
  estimate->add_option("--delimiter", ea.delimiter, "Field delimiter (single character or 'tab')");
  estimate->add_option("--confounder", ea.confounder, "Observed confounder column, reported as beta_prime");
  estimate->add_flag("--normalize", ea.normalize, "Scale predictors to unit variance");
  estimate->add_option("--sigma-factor", ea.sigma_factor, "Kernel width relative to the spectral range")
      ->check(CLI::PositiveNumber);
  estimate->add_option("--beta-steps", ea.beta_steps, "Grid points for beta")->check(CLI::Range(2, 100000));
  estimate->add_option("--eta-steps", ea.eta_steps, "Grid points for eta")->check(CLI::Range(2, 100000));
  estimate->add_option("--out", ea.out, "Result JSON path (default: stdout)");

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "Convert between gamma and beta from spectral moments");
  auto* g = convert->add_option("--gamma", ca.gamma, "Correlative strength");
  auto* b = convert->add_option("--beta", ca.beta, "Structural strength");
  g->excludes(b);
  convert->add_option("--m1", ca.moments.m_minus1, "First inverse moment of the tracial measure")->required();
  convert->add_option("--m2", ca.moments.m_minus2, "Second inverse moment of the tracial measure")->required();
  convert->add_option("--sxy2", ca.moments.norm_sxy_sq, "Squared norm of Sigma_XY")->required();
  convert->add_option("--ahat2", ca.moments.norm_ahat_sq, "Squared norm of the regression vector")->required();
  convert->add_flag("--roundtrip", ca.roundtrip, "Convert back and check the input is recovered");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suites");
  verify_cmd->add_option("--size", va.size, "Suite size")->check(CLI::IsMember({"small", "full"}));
  verify_cmd->add_option("--seed", va.seed, "Root seed");
  verify_cmd->add_option("--eigen-tol", va.eigen_tol, "Eigen reconstruction tolerance");
  verify_cmd->add_option("--identity-tol", va.identity_tol, "Measure identity tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::InvalidInput);
  }

  try {
    if (*simulate) return run_simulate(sa);
    if (*estimate) return run_estimate(ea);
    if (*convert) {
      if (!ca.gamma && !ca.beta) fail(ErrorKind::InvalidInput, "convert needs --gamma or --beta");
      return run_convert(ca);
    }
    return run_verify(va);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::InvalidInput);
  }
}
