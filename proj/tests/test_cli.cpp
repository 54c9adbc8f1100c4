#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "brt/config.hpp"
#include "brt/io.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using namespace brt;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("brt_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "experiment.ini";
  std::ofstream(p) << text;
  return p.string();
}

struct Result {
  int code;
  std::string out, err;
};

Result brt_run(std::vector<std::string> args) {
  args.insert(args.begin(), "brt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string manifest_value(const fs::path& p, const std::string& key) {
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  return {};
}

const char* kGaussianDisk = R"(
[boundary]
kind = circle
[family]
kind = half-plane-incoming
[grid]
n = 48
n_alpha = 90
[phantom1]
kind = gaussian
cx = 0.4
cy = 0.1
sigma = 0.08
)";

}  // namespace

TEST_CASE("forward writes a nonzero sinogram and records the family") {
  const fs::path dir = scratch("forward");
  const auto cfg = write_config(dir, kGaussianDisk);
  const Result r = brt_run({"forward", "--config", cfg, "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const Sinogram g = read_sinogram((dir / "out" / "sinogram.txt").string());
  CHECK(l2_norm(g) > 0.0);
  CHECK(g.masked_count() > 0);
  const fs::path m = dir / "out" / "manifest.txt";
  CHECK(manifest_value(m, "family") == "half-plane-incoming");
  CHECK(manifest_value(m, "operator") == "broken-ray family=half-plane-incoming");
  CHECK(fs::exists(dir / "out" / "phantom.pgm"));
}

TEST_CASE("parallel offset 0 gives twice the Radon sinogram") {
  const fs::path dir = scratch("parallel0");
  const std::string body = "[grid]\nn = 32\nn_alpha = 60\n[phantom1]\nkind = shepp_logan\nscale = 0.8\n";
  const auto radon_cfg = write_config(dir, "[family]\nkind = radon\n" + body);
  REQUIRE(brt_run({"forward", "--config", radon_cfg, "--out", (dir / "r").string()}).code == 0);
  const auto par_cfg = write_config(dir, "[family]\nkind = parallel\noffset = 0\n" + body);
  REQUIRE(brt_run({"forward", "--config", par_cfg, "--out", (dir / "p").string()}).code == 0);
  const Sinogram r = read_sinogram((dir / "r" / "sinogram.txt").string());
  const Sinogram p = read_sinogram((dir / "p" / "sinogram.txt").string());
  REQUIRE(r.data.size() == p.data.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < r.data.size(); ++i) worst = std::max(worst, std::abs(p.data[i] - 2.0 * r.data[i]));
  CHECK(worst == 0.0);
}

TEST_CASE("arc family: bins whose legs miss the phantom support are zero") {
  // Truncated coherent state: exactly zero outside the disk |x - c| < r.
  const fs::path dir = scratch("arc");
  const auto cfg = write_config(dir, R"(
[boundary]
kind = circle
[family]
kind = arc
tau_min = 1.0
tau_max = 2.2
[grid]
n = 64
n_alpha = 120
[phantom1]
kind = coherent
cx = 0.45
cy = -0.2
sigma = 0.05
support_radius = 0.12
)");
  REQUIRE(brt_run({"forward", "--config", cfg, "--out", (dir / "out").string()}).code == 0);
  const Sinogram g = read_sinogram((dir / "out" / "sinogram.txt").string());
  const Boundary disk = Boundary::circle(1.0);
  const Vec2 c{0.45, -0.2};
  const double reach = 0.12 + 3.0 * (2.0 / 64);  // support plus the interpolation footprint
  int clear = 0, crossing = 0, active = 0;
  for (int j = 0; j < g.layout.n_alpha; ++j) {
    for (int k = 0; k < g.layout.n_s; ++k) {
      const double v = g.at(j, k);
      if (is_masked(v)) continue;
      ++active;
      const LineCoords in(g.layout.s_at(k), g.layout.alpha_at(j));
      const ReflectionEvent ev = reflect_line(disk, in);
      const bool misses = std::abs(dot(c, in.w()) - in.s) > reach &&
                          std::abs(dot(c, ev.line_out.w()) - ev.line_out.s) > reach;
      if (misses) {
        ++clear;
        CHECK(v == 0.0);
      } else if (std::abs(dot(c, in.w()) - in.s) < 0.05) {
        ++crossing;
        CHECK(v != 0.0);
      }
    }
  }
  CHECK(active > 0);
  CHECK(clear > 0);
  CHECK(crossing > 0);
}

TEST_CASE("reconstruct writes iterates, error report and manifest") {
  const fs::path dir = scratch("reconstruct");
  const auto cfg = write_config(dir, std::string(kGaussianDisk) +
                                         "[reconstruction]\nmethod = landweber\niterations = 6\nrecord_every = 3\n"
                                         "support = domain\n[predict]\ncaustic = true\nsource_x = 0.4\nsource_y = 0.1\n");
  const fs::path out = dir / "out";
  REQUIRE(brt_run({"reconstruct", "--config", cfg, "--out", out.string(), "--threads", "1"}).code == 0);
  for (const char* f : {"fbp.txt", "final.txt", "error.txt", "error.pgm", "rec_k0003.txt", "rec_k0006.txt",
                        "residuals.csv", "caustic.csv", "config.ini"})
    CHECK_MESSAGE(fs::exists(out / f), f);
  const fs::path m = out / "manifest.txt";
  CHECK(std::stod(manifest_value(m, "gamma")) > 0.0);
  CHECK(manifest_value(m, "n_iters") == "6");
  CHECK(manifest_value(m, "support") == "domain");
  const double e = std::stod(manifest_value(m, "relative_error"));
  CHECK(e > 0.0);
  CHECK(e < 1.0);
  CHECK(std::stod(manifest_value(m, "linf_error")) > 0.0);
}

TEST_CASE("a run is reproducible from its manifest directory at one thread") {
  const fs::path dir = scratch("repro");
  const auto cfg = write_config(dir, std::string(kGaussianDisk) +
                                         "[reconstruction]\nmethod = landweber\niterations = 4\nsupport = domain\n");
  REQUIRE(brt_run({"reconstruct", "--config", cfg, "--out", (dir / "a").string(), "--threads", "1", "--seed", "9"})
              .code == 0);
  CHECK(manifest_value(dir / "a" / "manifest.txt", "seed") == "9");
  // Rerun from the written config.ini alone.
  REQUIRE(brt_run({"reconstruct", "--config", (dir / "a" / "config.ini").string(), "--out", (dir / "b").string(),
                   "--threads", "1"})
              .code == 0);
  CHECK(slurp(dir / "a" / "final.txt") == slurp(dir / "b" / "final.txt"));
  CHECK(manifest_value(dir / "a" / "manifest.txt", "gamma") == manifest_value(dir / "b" / "manifest.txt", "gamma"));
  const ExperimentConfig written = load_config((dir / "a" / "config.ini").string());
  CHECK(written.seed == 9);
  CHECK(written.threads == 1);
}

TEST_CASE("reconstruct from a sinogram file matches the simulated run") {
  const fs::path dir = scratch("from_file");
  const auto cfg = write_config(dir, kGaussianDisk);
  REQUIRE(brt_run({"reconstruct", "--config", cfg, "--out", (dir / "sim").string()}).code == 0);
  REQUIRE(brt_run({"reconstruct", "--config", cfg, "--out", (dir / "file").string(), "--sinogram",
                   (dir / "sim" / "sinogram.txt").string()})
              .code == 0);
  CHECK(slurp(dir / "sim" / "final.txt") == slurp(dir / "file" / "final.txt"));
}

TEST_CASE("predict writes caustic, chain and polygon radii") {
  const fs::path dir = scratch("predict");
  const auto cfg = write_config(dir, R"(
[boundary]
kind = circle
[predict]
caustic = true
locus = true
source_x = 0.3
source_y = 0.2
chain = true
chain_x = 0
chain_y = 0.6
chain_xi_x = 0
chain_xi_y = 1
polygon_n_max = 5
)");
  const fs::path out = dir / "out";
  REQUIRE(brt_run({"predict", "--config", cfg, "--out", out.string()}).code == 0);
  CHECK(fs::exists(out / "caustic.csv"));
  CHECK(fs::exists(out / "locus.csv"));
  CHECK(slurp(out / "chain.csv").find("complete") != std::string::npos);
  CHECK(manifest_value(out / "manifest.txt", "chain_radial") == "true");
  CHECK(manifest_value(out / "manifest.txt", "chain_status") == "complete");
  CHECK(manifest_value(out / "manifest.txt", "polygon_radii") == "6");
  CHECK(slurp(out / "radii.csv").find("4,1,0.7071067811865") != std::string::npos);
}

TEST_CASE("selftest passes, and fails the dot-product checks with a corrupted adjoint") {
  const Result ok = brt_run({"selftest", "--n", "64"});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  const Result bad = brt_run({"selftest", "--n", "64", "--corrupt-adjoint"});
  CHECK(bad.code == cli::kExitNumerical);
  CHECK(bad.out.find("adjoint.radon                FAIL") != std::string::npos);
  CHECK(bad.out.find("jacobian.det                 PASS") != std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  CHECK(brt_run({}).code == cli::kExitValidation);
  CHECK(brt_run({"frobnicate"}).code == cli::kExitValidation);
  CHECK(brt_run({"forward"}).code == cli::kExitValidation);  // --config missing
  CHECK(brt_run({"forward", "--config", (dir / "missing.ini").string()}).code == cli::kExitValidation);

  const Result bad_key = brt_run({"forward", "--config", write_config(dir, "[grid]\nn = 4\n")});
  CHECK(bad_key.code == cli::kExitValidation);
  CHECK(bad_key.err.find("[grid] n") != std::string::npos);

  const auto outside = write_config(dir, "[grid]\nn = 32\n[phantom1]\nkind = gaussian\ncx = 1.5\ncy = 0\n");
  const Result o = brt_run({"forward", "--config", outside, "--out", (dir / "outside").string()});
  CHECK(o.code == cli::kExitValidation);
  CHECK(o.err.find("[phantom1] cx") != std::string::npos);

  const auto diverge = write_config(dir, std::string(kGaussianDisk) +
                                             "[reconstruction]\nmethod = landweber\niterations = 30\nstep_size = 50\n");
  const Result d = brt_run({"reconstruct", "--config", diverge, "--out", (dir / "div").string()});
  CHECK(d.code == cli::kExitNumerical);
  CHECK(manifest_value(dir / "div" / "manifest.txt", "status") == "diverged");
}
