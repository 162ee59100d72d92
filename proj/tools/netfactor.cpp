#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "netfactor/io.hpp"
#include "netfactor/reconstruct.hpp"
#include "netfactor/spectral.hpp"

namespace {

using namespace netfactor;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
      return 1;
    case ErrorCode::AssumptionViolation:
    case ErrorCode::ShapeViolation:
    case ErrorCode::NotRelativeDegreeZero:
    case ErrorCode::NotControllable:
    case ErrorCode::NonMinimalV:
    case ErrorCode::Unstable:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonSquare:
    case ErrorCode::NoPositiveDefiniteR:
    case ErrorCode::NoneMinimumPhase:
    case ErrorCode::MultipleMinimumPhase:
    case ErrorCode::EmptyDomain:
    case ErrorCode::GenerationExhausted:
      return 2;
    default:
      return 3;
  }
}

struct Options {
  bool quiet = false;
  int precision = 4;
  double tol = 0.0;  // 0 means: keep defaults (including NETFACTOR_TOL)
  int grid_points = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;

  Tolerances tolerances() const {
    Tolerances t = default_tolerances();
    if (tol > 0.0) t.residual = tol;
    return t;
  }

  FrequencyGrid grid() const {
    FrequencyGrid g;
    if (grid_points > 0) g.log_points = grid_points;
    if (seed_set) g.seed = seed;
    return g;
  }
};

// Writes the bundle's files under --out (when given) and prints the report;
// in quiet mode stdout carries only the written paths.
void deliver(const ReportBundle& bundle, const Options& opt) {
  std::vector<std::string> written;
  if (!opt.out_dir.empty()) {
    for (const auto& [name, content] : bundle.files) {
      std::string path = opt.out_dir + "/" + name;
      write_text_file(path, content);
      written.push_back(path);
    }
  }
  if (opt.quiet) {
    for (const std::string& path : written) std::cout << path << "\n";
    return;
  }
  std::cout << bundle.text;
  for (const std::string& path : written) std::cout << "wrote " << path << "\n";
}

std::string format_value(double v, int precision) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

void describe_assumptions(const AssumptionReport& rep) {
  std::vector<std::string> failed;
  if (!rep.hurwitz) failed.push_back("stability");
  if (!rep.minimal) failed.push_back("minimality");
  if (!rep.c_is_identity_zero) failed.push_back("output shape [I 0]");
  if (!rep.d_is_zero) failed.push_back("zero feedthrough");
  if (!rep.p_diagonal) failed.push_back("diagonal noise map");
  if (failed.empty()) return;
  std::string msg = "input violates:";
  for (const std::string& f : failed) msg += " " + f + ";";
  msg.pop_back();
  throw Error(ErrorCode::AssumptionViolation, msg);
}

ReportBundle report_dsf(const SystemFile& file, const Options& opt) {
  Tolerances tol = opt.tolerances();
  describe_assumptions(validate_assumptions(file.sys, tol));
  Dsf dsf = compute_dsf(file.sys);

  ReportBundle bundle;
  std::ostringstream text;
  text << "structure function of a system with " << file.sys.outputs()
       << " manifest signals and " << file.sys.order() - file.sys.outputs()
       << " latent states\n\n";
  text << render_rational_grid("Q", transfer_matrix_rationals(dsf.q_realization), opt.precision);
  text << "\n";
  text << render_rational_grid("P", transfer_matrix_rationals(dsf.p_realization), opt.precision);

  // Closure audit: the manifest signals must satisfy y = Q y + P u, so the
  // rebuilt transfer (I - Q)^{-1} P has to match the system response.
  FrequencyGrid grid = opt.grid();
  double worst = 0.0;
  for (double omega : grid.frequencies()) {
    Complex s(0.0, omega);
    ComplexMatrix q = frequency_response(dsf.q_realization, s, tol);
    ComplexMatrix pm = frequency_response(dsf.p_realization, s, tol);
    ComplexMatrix g = frequency_response(file.sys, s, tol);
    ComplexMatrix eye = ComplexMatrix::Identity(q.rows(), q.cols());
    double r = ((eye - q).lu().solve(pm) - g).norm() / (1.0 + g.norm());
    worst = std::max(worst, r);
  }
  text << "\nclosure residual over " << grid.frequencies().size()
       << " frequencies: " << format_value(worst, 3) << "\n";

  bundle.text = text.str();
  SystemFile q_file{1, dsf.q_realization, {}};
  SystemFile p_file{1, dsf.p_realization, {}};
  bundle.files.emplace_back("q_realization.json", system_to_json(q_file));
  bundle.files.emplace_back("p_realization.json", system_to_json(p_file));
  return bundle;
}

void append_solution_report(std::ostringstream& text, ReportBundle& bundle,
                            const NetworkSolutionSet& set, const Options& opt) {
  text << "riccati solutions: " << set.are_count
       << ", admissible: " << set.admissible_count
       << ", diagonal noise map: " << set.diagonal_count
       << ", distinct networks: " << set.solutions.size() << "\n";
  for (const std::string& note : set.notes) text << "note: " << note << "\n";

  for (std::size_t k = 0; k < set.solutions.size(); ++k) {
    const NetworkSolution& sol = set.solutions[k];
    text << "\nsolution " << k + 1 << (is_minimum_phase(sol.sys) ? " (minimum phase)" : "")
         << "\n";
    if (sol.r2.size() > 0) {
      text << "  latent covariance completion:\n" << render_matrix(sol.r2, opt.precision);
    }
    if (sol.p_offdiagonal > 0.0)
      text << "  off-diagonal residual after search: "
           << format_value(sol.p_offdiagonal, 3) << "\n";
    text << render_rational_grid("  Q", transfer_matrix_rationals(sol.dsf.q_realization),
                                 opt.precision);
    text << render_rational_grid("  P", transfer_matrix_rationals(sol.dsf.p_realization),
                                 opt.precision);
    text << "  certificate worst residual: "
         << format_value(sol.certificate.residuals.worst(), 3) << "\n";

    std::string stem = "solution_" + std::to_string(k + 1);
    SystemFile sol_file{1, sol.sys, {}};
    bundle.files.emplace_back(stem + ".json", system_to_json(sol_file));
    CertificateFile cert{1, sol.certificate.s, sol.certificate.t, sol.certificate.j};
    bundle.files.emplace_back("certificate_" + std::to_string(k + 1) + ".json",
                              certificate_to_json(cert));
  }
}

int report_enumerate(const SystemFile& file, const std::string& from, const Options& opt) {
  Tolerances tol = opt.tolerances();
  ReportBundle bundle;
  std::ostringstream text;

  NetworkSolutionSet set;
  if (from == "phi") {
    PositiveRealSystem z = positive_real_realization(file.sys);
    set = reconstruct_from_phi(z, tol);
    text << "networks reconstructed from the output spectral density\n";
  } else {
    set = enumerate_equivalent_networks(file.sys, tol);
    text << "networks sharing the input system's output spectral density\n";
  }

  if (set.kind == SetKind::Continuum) {
    text << "solution continuum detected: the equivalence class is not a finite list\n";
    for (const std::string& note : set.notes) text << "note: " << note << "\n";
    bundle.text = text.str();
    deliver(bundle, opt);
    return 4;
  }

  append_solution_report(text, bundle, set, opt);
  bundle.text = text.str();
  deliver(bundle, opt);
  return 0;
}

int report_full_noise(const SystemFile& file, std::vector<double> thetas, const Options& opt) {
  if (thetas.empty()) thetas = {-0.2, -0.1, -0.05, 0.0, 0.05, 0.09};
  FullNoiseFamily family = full_noise_scalar_family(file.sys, thetas);

  ReportBundle bundle;
  std::ostringstream text;
  text << "solution continuum: every theta below gives a network with the same "
          "output spectral density\n";
  text << "admissible interval: [" << format_value(family.theta_min, opt.precision) << ", "
       << format_value(family.theta_max, opt.precision) << "]\n";
  for (const std::string& note : family.notes) text << "note: " << note << "\n";

  for (std::size_t k = 0; k < family.samples.size(); ++k) {
    const FullNoiseSample& sample = family.samples[k];
    text << "\ntheta = " << format_value(sample.theta, opt.precision)
         << "  (worst relation residual "
         << format_value(sample.certificate.residuals.worst(), 3) << ")\n";
    text << render_rational_grid("  Q", transfer_matrix_rationals(sample.dsf.q_realization),
                                 opt.precision);
    SystemFile sol_file{1, sample.sys, {}};
    bundle.files.emplace_back("family_" + std::to_string(k + 1) + ".json",
                              system_to_json(sol_file));
  }
  bundle.text = text.str();
  deliver(bundle, opt);
  return 0;
}

int report_verify(const SystemFile& ref, const SystemFile& cand, const CertificateFile& cert,
                  const Options& opt) {
  double tol = opt.tol > 0.0 ? opt.tol : default_tolerances().residual;
  ResidualReport report = verify_glover_willems(ref.sys, cand.sys, cert.s, cert.t, tol);
  ReportBundle bundle;
  bundle.text = "equivalence relations between the two realizations:\n" +
                render_residual_report(report, opt.precision);
  deliver(bundle, opt);
  return report.pass ? 0 : 5;
}

int report_simulate(const std::string& config_path, const Options& opt_in) {
  // the study is pointless without its CSV files, so default to the
  // working directory when no destination is given
  Options opt = opt_in;
  if (opt.out_dir.empty()) opt.out_dir = ".";
  ExperimentConfig cfg = config_path.empty()
                             ? ExperimentConfig{}
                             : config_from_json(read_text_file(config_path));
  if (opt.seed_set) cfg.seed = opt.seed;
  if (opt.tol > 0.0) cfg.tolerances.residual = opt.tol;
  ExperimentResult result = run_experiment(cfg);

  ReportBundle bundle;
  std::ostringstream trials_csv;
  write_trials_csv(result.records, trials_csv);
  std::ostringstream summary_csv;
  write_summary_csv(result.summary, summary_csv);
  bundle.files.emplace_back("trials.csv", trials_csv.str());
  bundle.files.emplace_back("summary.csv", summary_csv.str());

  std::ostringstream text;
  text << cfg.trials << " trials at seed " << cfg.seed << "\n";
  text << "l2  trials  ok  continuum  skipped  failed  mean_are  mean_diagonal\n";
  for (const StratumSummary& s : result.summary) {
    text << std::setw(2) << s.l2 << std::setw(8) << s.trials << std::setw(4) << s.ok
         << std::setw(11) << s.continuum << std::setw(9) << s.skipped << std::setw(8)
         << s.failed << std::setw(10) << format_value(s.mean_are, 3) << std::setw(15)
         << format_value(s.mean_diagonal, 3) << "\n";
  }
  bundle.text = text.str();
  deliver(bundle, opt);
  return 0;
}

int report_example(const std::string& name, const Options& opt) {
  ReportBundle bundle;
  if (name.empty()) {
    std::ostringstream text;
    text << "built-in examples:\n";
    for (const std::string& n : example_names()) text << "  " << n << "\n";
    bundle.text = text.str();
    deliver(bundle, opt);
    return 0;
  }
  SystemFile file = example_system(name);
  std::string content = system_to_json(file);
  bundle.text = content;
  bundle.files.emplace_back(name + ".json", content);
  deliver(bundle, opt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network factor analysis: structure functions, spectral factor "
               "enumeration and equivalence certificates"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_flag("--quiet", opt.quiet, "print only written file paths");
  app.add_option("--precision", opt.precision, "significant digits in reports")
      ->check(CLI::Range(1, 17));
  app.add_option("--tol", opt.tol, "residual tolerance (overrides NETFACTOR_TOL)");
  app.add_option("--grid", opt.grid_points, "log-spaced frequency count");
  auto* seed_opt = app.add_option("--seed", opt.seed, "random seed override");
  app.add_option("--out", opt.out_dir, "directory for generated files");

  std::string dsf_input;
  auto* cmd_dsf = app.add_subcommand("dsf", "structure function of a system file");
  cmd_dsf->add_option("input", dsf_input, "system JSON file")->required();

  std::string enum_input;
  std::string enum_from = "system";
  bool full_noise = false;
  std::vector<double> thetas;
  auto* cmd_enumerate =
      app.add_subcommand("enumerate", "all networks sharing one output spectral density");
  cmd_enumerate->add_option("input", enum_input, "system JSON file")->required();
  cmd_enumerate->add_option("--from", enum_from, "start from the system or its density")
      ->check(CLI::IsMember({"system", "phi"}));
  cmd_enumerate->add_flag("--full-noise", full_noise,
                          "sample the scalar family for noise on every state");
  cmd_enumerate->add_option("--theta", thetas, "family parameters to sample")
      ->delimiter(',');

  std::string verify_ref;
  std::string verify_cand;
  std::string verify_cert;
  auto* cmd_verify =
      app.add_subcommand("verify", "check an equivalence certificate between two systems");
  cmd_verify->add_option("reference", verify_ref, "reference system JSON")->required();
  cmd_verify->add_option("candidate", verify_cand, "candidate system JSON")->required();
  cmd_verify->add_option("certificate", verify_cert, "certificate JSON")->required();

  std::string sim_config;
  auto* cmd_simulate = app.add_subcommand("simulate", "seeded random-system study");
  cmd_simulate->add_option("config", sim_config, "experiment config JSON");

  std::string example_name;
  auto* cmd_example = app.add_subcommand("example", "built-in fixture systems");
  cmd_example->add_option("name", example_name, "fixture name");

  CLI11_PARSE(app, argc, argv);
  opt.seed_set = seed_opt->count() > 0;

  try {
    if (cmd_dsf->parsed()) {
      ReportBundle bundle = report_dsf(system_from_json(read_text_file(dsf_input)), opt);
      deliver(bundle, opt);
      return 0;
    }
    if (cmd_enumerate->parsed()) {
      SystemFile file = system_from_json(read_text_file(enum_input));
      if (full_noise) return report_full_noise(file, thetas, opt);
      return report_enumerate(file, enum_from, opt);
    }
    if (cmd_verify->parsed()) {
      return report_verify(system_from_json(read_text_file(verify_ref)),
                           system_from_json(read_text_file(verify_cand)),
                           certificate_from_json(read_text_file(verify_cert)), opt);
    }
    if (cmd_simulate->parsed()) return report_simulate(sim_config, opt);
    if (cmd_example->parsed()) return report_example(example_name, opt);
  } catch (const netfactor::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
