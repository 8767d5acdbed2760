// Command-line front end: simulate benchmark scenes, unmix them, evaluate estimates.
//
// Exit codes: 0 success, 2 usage/validation/I-O error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mvs/matrix_io.hpp"
#include "mvs/metrics.hpp"
#include "mvs/model.hpp"
#include "mvs/sisal.hpp"
#include "mvs/subspace.hpp"
#include "mvs/synthgen.hpp"
#include "mvs/vca.hpp"

namespace fs = std::filesystem;
using mvs::io::format_double;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct SimulateArgs {
  long p = 0;
  long n = 0;
  long bands = 0;
  std::string snr_db = "40";
  double purity = 0.8;
  double alpha = 1.0;
  bool pure_pixels = false;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "txt";
};

struct UnmixArgs {
  std::string input;
  long p = 0;
  mvs::SisalConfig config;
  std::string init = "vca";
  std::string out;
  std::string format = "txt";
};

struct EvalArgs {
  std::string estimate;
  std::string truth;
  std::string report;
  std::string csv;
};

double parse_snr(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "Inf" || text == "none") return mvs::kNoNoise;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw std::invalid_argument("--snr-db: expected a number or 'inf'");
  return value;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory '" + dir + "'");
  }
}

std::string matrix_file(const std::string& dir, const std::string& stem, mvs::io::MatrixFormat f) {
  return (fs::path(dir) / (stem + (f == mvs::io::MatrixFormat::kCsv ? ".csv" : ".txt"))).string();
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw std::runtime_error("no such file: '" + path + "'");
}

int run_simulate(const SimulateArgs& args) {
  mvs::SimulationSpec spec;
  spec.p = args.p;
  spec.n = args.n;
  spec.bands = args.bands;
  spec.snr_db = parse_snr(args.snr_db);
  spec.purity_threshold = args.purity;
  if (args.p >= 1) spec.dirichlet_alpha = mvs::Vector::Constant(args.p, args.alpha);
  spec.pure_pixels = args.pure_pixels;
  spec.seed = args.seed;
  spec.validate();
  const auto format = mvs::io::parse_format(args.format);

  const mvs::SimulatedScene scene = mvs::generate(spec);
  ensure_dir(args.out);
  mvs::io::write_matrix(matrix_file(args.out, "Y", format), scene.data.data(), format);
  mvs::io::write_matrix(matrix_file(args.out, "M", format), scene.mixing.matrix(), format);
  mvs::io::write_matrix(matrix_file(args.out, "S", format), scene.abundances.matrix(), format);
  mvs::io::write_key_values(fs::path(args.out) / "manifest.txt",
                            {{"tool", "mvs_unmix"},
                             {"version", MVS_VERSION},
                             {"command", "simulate"},
                             {"p", std::to_string(spec.p)},
                             {"n", std::to_string(spec.n)},
                             {"bands", std::to_string(spec.band_count())},
                             {"snr_db", format_double(spec.snr_db)},
                             {"purity", format_double(spec.purity_threshold)},
                             {"alpha", format_double(args.alpha)},
                             {"pure_pixels", args.pure_pixels ? "1" : "0"},
                             {"seed", std::to_string(spec.seed)},
                             {"format", args.format},
                             {"acceptance_rate", format_double(scene.acceptance_rate)}});
  std::cout << "wrote " << args.out << " (p=" << spec.p << " n=" << spec.n
            << " bands=" << spec.band_count() << ")\n";
  return 0;
}

int run_unmix(const UnmixArgs& args) {
  args.config.validate();
  if (args.init != "vca" && args.init != "random") {
    throw std::invalid_argument("--init must be 'vca' or 'random'");
  }
  const auto format = mvs::io::parse_format(args.format);
  require_file(args.input);
  const mvs::SpectralDataset raw(mvs::io::read_matrix(args.input));
  const mvs::Index p = args.p;
  if (p < 1 || p > raw.band_count() || p > raw.pixel_count()) {
    throw std::invalid_argument("--p must be in [1, min(bands, pixels)] for input " +
                                std::to_string(raw.band_count()) + "x" +
                                std::to_string(raw.pixel_count()));
  }

  const auto t_start = std::chrono::steady_clock::now();
  const mvs::SubspaceModel subspace = mvs::fit_subspace(raw, p);
  const mvs::SpectralDataset coords = mvs::project(subspace, raw);
  const mvs::MixingMatrix init = args.init == "vca"
                                     ? mvs::vca_init(coords, p, args.config.seed)
                                     : mvs::random_columns(coords, p, args.config.seed);
  const mvs::SisalResult result = mvs::sisal(coords, args.config, init);
  const mvs::MixingMatrix m_hat = mvs::lift(subspace, result.mixing_estimate);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  ensure_dir(args.out);
  mvs::io::write_matrix(matrix_file(args.out, "M_hat", format), m_hat.matrix(), format);
  mvs::io::write_matrix(matrix_file(args.out, "S_hat", format),
                        result.abundance_estimate.matrix(), format);

  std::string trace;
  for (std::size_t i = 0; i < result.objective_trace.size(); ++i) {
    if (i > 0) trace += ',';
    trace += format_double(result.objective_trace[i]);
  }
  double max_constraint = 0.0;
  for (double r : result.constraint_trace) max_constraint = std::max(max_constraint, r);
  mvs::io::write_key_values(
      fs::path(args.out) / "report.txt",
      {{"tool", "mvs_unmix"},
       {"version", MVS_VERSION},
       {"command", "unmix"},
       {"input", args.input},
       {"p", std::to_string(p)},
       {"bands", std::to_string(raw.band_count())},
       {"n", std::to_string(raw.pixel_count())},
       {"lambda", format_double(args.config.lambda)},
       {"tau", format_double(args.config.tau)},
       {"mu", format_double(args.config.mu)},
       {"outer_iters", std::to_string(args.config.outer_iters)},
       {"inner_iters", std::to_string(args.config.inner_iters)},
       {"init", args.init},
       {"seed", std::to_string(args.config.seed)},
       {"iterations", std::to_string(result.iterations_run)},
       {"inner_iterations_total", std::to_string(result.inner_iterations_total)},
       {"stop_reason", result.stop_reason},
       {"final_objective", format_double(result.final_objective)},
       {"max_constraint_residual", format_double(max_constraint)},
       {"solver_time_s", format_double(result.wall_time_seconds)},
       {"wall_time_s", format_double(wall)},
       {"objective_trace", trace}});
  std::cout << "iterations=" << result.iterations_run << "\n"
            << "final_objective=" << format_double(result.final_objective) << "\n"
            << "wall_time_s=" << format_double(wall) << "\n";
  return 0;
}

int run_eval(const EvalArgs& args) {
  require_file(args.estimate);
  require_file(args.truth);
  const mvs::Matrix est = mvs::io::read_matrix(args.estimate);
  const mvs::Matrix ref = mvs::io::read_matrix(args.truth);
  if (est.rows() != ref.rows() || est.cols() != ref.cols()) {
    throw std::invalid_argument("shape mismatch: estimate is " + std::to_string(est.rows()) + "x" +
                                std::to_string(est.cols()) + ", truth is " +
                                std::to_string(ref.rows()) + "x" + std::to_string(ref.cols()));
  }
  const mvs::MixingMatrix m_hat(est);
  const mvs::MixingMatrix m_ref(ref);
  const double err = mvs::endmember_error(m_hat, m_ref);

  std::string wall = "nan";
  if (!args.report.empty()) {
    require_file(args.report);
    const auto kv = mvs::io::read_key_values(args.report);
    if (const std::string* w = mvs::io::find_value(kv, "wall_time_s")) wall = *w;
  }
  std::cout << "p=" << ref.cols() << "\n"
            << "bands=" << ref.rows() << "\n"
            << "frob_err=" << format_double(err) << "\n"
            << "rel_err=" << format_double(err / ref.norm()) << "\n"
            << "wall_time_s=" << wall << "\n";

  if (!args.csv.empty()) {
    const bool fresh = !fs::exists(args.csv) || fs::file_size(args.csv) == 0;
    std::ofstream out(args.csv, std::ios::app);
    if (!out) throw std::runtime_error("cannot open '" + args.csv + "' for appending");
    if (fresh) out << "p,bands,frob_err,wall_time_s\n";
    out << ref.cols() << ',' << ref.rows() << ',' << format_double(err) << ',' << wall << '\n';
  }
  return 0;
}

void apply_thread_cap() {
  int threads = 1;
  if (const char* env = std::getenv("MVS_UNMIX_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) threads = parsed;
  }
  Eigen::setNbThreads(threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-volume simplex hyperspectral unmixing"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic Dirichlet mixture scene");
  simulate->add_option("--p", sim.p, "Number of endmembers")->required();
  simulate->add_option("--n", sim.n, "Number of pixels")->required();
  simulate->add_option("--bands", sim.bands, "Number of bands (default p)");
  simulate->add_option("--snr-db", sim.snr_db, "SNR in dB, or 'inf' for noiseless")
      ->capture_default_str();
  simulate->add_option("--purity", sim.purity, "Reject pixels with any abundance above this")
      ->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Symmetric Dirichlet parameter")
      ->capture_default_str();
  simulate->add_flag("--pure-pixels", sim.pure_pixels,
                     "Make the first p pixels the endmembers (needs --purity 1)");
  simulate->add_option("--seed", sim.seed, "Random seed")->required();
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--format", sim.format, "Matrix format: txt or csv")->capture_default_str();

  UnmixArgs unmix;
  auto* unmix_cmd = app.add_subcommand("unmix", "Estimate endmembers and abundances");
  unmix_cmd->add_option("--input", unmix.input, "Data matrix (bands x pixels)")->required();
  unmix_cmd->add_option("--p", unmix.p, "Number of endmembers")->required();
  unmix_cmd->add_option("--lambda", unmix.config.lambda, "Hinge weight")->capture_default_str();
  unmix_cmd->add_option("--tau", unmix.config.tau, "Augmented Lagrangian penalty")
      ->capture_default_str();
  unmix_cmd->add_option("--mu", unmix.config.mu, "Proximal weight")->capture_default_str();
  unmix_cmd->add_option("--outer-iters", unmix.config.outer_iters, "Outer iterations")
      ->capture_default_str();
  unmix_cmd->add_option("--inner-iters", unmix.config.inner_iters, "Inner iterations")
      ->capture_default_str();
  unmix_cmd->add_option("--init", unmix.init, "Initializer: vca or random")->capture_default_str();
  unmix_cmd->add_option("--seed", unmix.config.seed, "Random seed for the initializer")->required();
  unmix_cmd->add_option("--out", unmix.out, "Output directory")->required();
  unmix_cmd->add_option("--format", unmix.format, "Matrix format: txt or csv")
      ->capture_default_str();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Compare an estimate against ground truth");
  eval->add_option("--estimate", ev.estimate, "Estimated mixing matrix")->required();
  eval->add_option("--truth", ev.truth, "Ground-truth mixing matrix")->required();
  eval->add_option("--report", ev.report, "Run report written by unmix");
  eval->add_option("--csv", ev.csv, "Append a CSV row to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  apply_thread_cap();
  try {
    if (*simulate) return run_simulate(sim);
    if (*unmix_cmd) return run_unmix(unmix);
    if (*eval) return run_eval(ev);
  } catch (const mvs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
