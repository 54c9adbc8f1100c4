#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <ostream>

#include "brt/errors.hpp"

namespace brt::cli {

namespace {

void add_run_flags(CLI::App* sub, RunOptions& opt, int& threads, std::int64_t& seed) {
  sub->add_option("--config", opt.config_path, "experiment config file")->required();
  sub->add_option("--out", opt.out_dir, "output directory (overrides [run] output_dir)");
  sub->add_option("--threads", threads, "OpenMP threads (overrides [run] threads)");
  sub->add_option("--seed", seed, "random seed (overrides [run] seed)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Broken-ray tomography experiments"};
  app.require_subcommand(1);

  RunOptions run_opt;
  int threads = -1;
  std::int64_t seed = -1;
  auto* forward = app.add_subcommand("forward", "simulate data from the configured phantoms");
  auto* reconstruct = app.add_subcommand("reconstruct", "FBP or Landweber reconstruction with error report");
  auto* predict = app.add_subcommand("predict", "caustics, conjugate locus, chains and polygon radii");
  for (auto* sub : {forward, reconstruct, predict}) add_run_flags(sub, run_opt, threads, seed);
  reconstruct->add_option("--sinogram", run_opt.sinogram_path, "read data from a sinogram file");

  SelftestOptions st;
  std::int64_t st_seed = 1;
  auto* selftest = app.add_subcommand("selftest", "operator and geometry consistency checks");
  selftest->add_option("--n", st.n, "image side")->capture_default_str();
  selftest->add_option("--seed", st_seed, "random seed")->capture_default_str();
  selftest->add_option("--out", st.out_dir, "write a manifest here");
  selftest->add_option("--threads", threads, "OpenMP threads");
  selftest->add_flag("--corrupt-adjoint", st.corrupt_adjoint, "test hook: break every adjoint by 1%");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (app.get_subcommands().empty()) err << app.help();
    return kExitValidation;
  }

  try {
    if (threads == 0 || threads < -1) throw ValidationError("--threads must be positive");
    if (seed < -1 || st_seed < 0) throw ValidationError("--seed must be nonnegative");
    if (threads > 0) run_opt.threads = threads;
    if (seed >= 0) run_opt.seed = static_cast<std::uint64_t>(seed);
    if (*selftest) {
      st.seed = static_cast<std::uint64_t>(st_seed);
      if (threads > 0) omp_set_num_threads(threads);
      return cmd_selftest(st, out);
    }
    if (*forward) return cmd_forward(run_opt, out);
    if (*reconstruct) return cmd_reconstruct(run_opt, out);
    return cmd_predict(run_opt, out);
  } catch (const DivergenceDetected& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace brt::cli
