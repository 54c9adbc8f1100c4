#pragma once

// Experiment driver behind the `brt` executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace brt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Command-line overrides applied on top of the config file.
struct RunOptions {
  std::string config_path;
  std::string out_dir;              ///< empty keeps [run] output_dir
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string sinogram_path;        ///< reconstruct: read data instead of simulating
};

struct SelftestOptions {
  int n = 128;
  std::uint64_t seed = 1;
  bool corrupt_adjoint = false;     ///< test hook: perturbs every adjoint by 1%
  std::string out_dir;              ///< empty writes no files
};

int cmd_forward(const RunOptions& opt, std::ostream& log);
int cmd_reconstruct(const RunOptions& opt, std::ostream& log);
int cmd_predict(const RunOptions& opt, std::ostream& log);
int cmd_selftest(const SelftestOptions& opt, std::ostream& log);

/// Parses argv, dispatches, and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace brt::cli
