#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <ostream>

#include "brt/config.hpp"
#include "brt/errors.hpp"
#include "brt/io.hpp"
#include "brt/phantoms.hpp"
#include "brt/reconstruct.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;

namespace brt::cli {

namespace {

struct Session {
  ExperimentConfig cfg;
  std::string base_dir;
  fs::path out;
  Boundary boundary = Boundary::circle(1.0);
  Manifest manifest;

  std::string path(const std::string& name) const { return (out / name).string(); }
};

bool is_broken_ray(const ExperimentConfig& cfg) {
  return cfg.family.kind != "radon" && cfg.family.kind != "parallel";
}

// Loads the config, applies overrides, prepares the output directory and
// records everything needed to rerun in config.ini and the manifest header.
Session open_session(const RunOptions& opt, const std::string& command) {
  if (opt.config_path.empty()) throw ValidationError("--config is required");
  Session s;
  s.cfg = load_config(opt.config_path);
  const fs::path cfg_dir = fs::path(opt.config_path).parent_path();
  s.base_dir = cfg_dir.empty() ? "." : cfg_dir.string();
  if (!opt.out_dir.empty()) s.cfg.output_dir = opt.out_dir;
  if (opt.threads) s.cfg.threads = *opt.threads;
  if (opt.seed) s.cfg.seed = *opt.seed;
  if (s.cfg.threads < 0) throw ValidationError("--threads must be nonnegative");
  if (s.cfg.threads > 0) omp_set_num_threads(s.cfg.threads);
  if (s.cfg.boundary.kind == "curve")
    s.cfg.boundary.file = fs::absolute(fs::path(s.base_dir) / s.cfg.boundary.file).string();

  s.boundary = make_boundary(s.cfg.boundary, s.base_dir);
  s.out = s.cfg.output_dir;
  std::error_code ec;
  fs::create_directories(s.out, ec);
  if (ec) throw ValidationError("cannot create output directory '" + s.out.string() + "': " + ec.message());

  {
    std::FILE* f = std::fopen(s.path("config.ini").c_str(), "w");
    if (!f) throw ValidationError("cannot write " + s.path("config.ini"));
    const std::string text = serialize_config(s.cfg);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  }
  s.manifest.set("command", command);
  s.manifest.set("config", std::string("config.ini"));
  s.manifest.set("seed", static_cast<long long>(s.cfg.seed));
  s.manifest.set("threads", static_cast<long long>(s.cfg.threads > 0 ? s.cfg.threads : omp_get_max_threads()));
  s.manifest.set("boundary", s.cfg.boundary.kind);
  s.manifest.set("n", static_cast<long long>(s.cfg.grid.n));
  return s;
}

GridImage render_truth(const Session& s) {
  GridImage f = render(s.cfg.phantoms, make_image_layout(s.cfg.grid));
  if (is_broken_ray(s.cfg)) clip_to_domain(f, s.boundary);
  return f;
}

void describe_data(Manifest& m, const LinearOperator& op, const Sinogram& g) {
  const SinogramLayout l = g.layout;
  m.set("operator", op.describe());
  m.set("n_s", static_cast<long long>(l.n_s));
  m.set("n_alpha", static_cast<long long>(l.n_alpha));
  m.set("s_max", l.s_max);
  m.set("masked_bins", static_cast<long long>(g.masked_count()));
  m.set("sinogram_l2", l2_norm(g));
}

void write_image_pair(const Session& s, const std::string& stem, const GridImage& f) {
  write_image(s.path(stem + ".txt"), f);
  write_pgm(s.path(stem + ".pgm"), f);
}

std::string snapshot_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rec_k%04d", k);
  return buf;
}

}  // namespace

int cmd_forward(const RunOptions& opt, std::ostream& log) {
  Session s = open_session(opt, "forward");
  if (s.cfg.phantoms.empty()) throw ValidationError("config has no [phantom...] section");
  const auto op = make_operator(s.cfg, s.boundary);
  const GridImage f = render_truth(s);
  const Sinogram g = checked_forward(*op, f);

  write_image_pair(s, "phantom", f);
  write_sinogram(s.path("sinogram.txt"), g);
  describe_data(s.manifest, *op, g);
  s.manifest.set("family", s.cfg.family.kind);
  s.manifest.set("phantoms", static_cast<long long>(s.cfg.phantoms.size()));
  s.manifest.write(s.path("manifest.txt"));
  log << "forward: " << op->describe() << ", " << g.masked_count() << " masked bins, |g| = " << l2_norm(g)
      << " -> " << s.out.string() << '\n';
  return kExitOk;
}

int cmd_reconstruct(const RunOptions& opt, std::ostream& log) {
  Session s = open_session(opt, "reconstruct");
  const auto op = make_operator(s.cfg, s.boundary);
  const auto& rc = s.cfg.reconstruction;

  std::optional<GridImage> truth;
  if (!s.cfg.phantoms.empty()) truth = render_truth(s);
  Sinogram g;
  if (!opt.sinogram_path.empty()) {
    g = read_sinogram(opt.sinogram_path);
    if (!(g.layout == op->data_layout())) throw ValidationError("sinogram layout does not match the config grid");
    s.manifest.set("data", fs::absolute(opt.sinogram_path).string());
  } else {
    if (!truth) throw ValidationError("config has no [phantom...] section and no --sinogram was given");
    g = checked_forward(*op, *truth);
    write_sinogram(s.path("sinogram.txt"), g);
    s.manifest.set("data", std::string("simulated"));
  }
  describe_data(s.manifest, *op, g);
  s.manifest.set("family", s.cfg.family.kind);
  s.manifest.set("method", rc.method);

  const GridImage first = fbp(g, *op);
  write_image_pair(s, "fbp", first);

  GridImage final = first;
  if (rc.method == "landweber") {
    LandweberConfig lw;
    lw.n_iters = rc.iterations;
    lw.record_every = rc.record_every;
    lw.support_mask = make_support_mask(s.cfg, s.boundary);
    if (rc.step_size > 0.0) {
      lw.step_size = rc.step_size;
    } else {
      const StepEstimate est = estimate_step(*op, 30, s.cfg.seed);
      lw.step_size = est.step_size;
      s.manifest.set("lambda_max", est.lambda_max);
    }
    std::size_t kept = 0;
    for (char c : lw.support_mask) kept += c ? 1 : 0;
    s.manifest.set("support", rc.support);
    s.manifest.set("support_pixels", static_cast<long long>(lw.support_mask.empty() ? 0 : kept));

    LandweberResult res;
    try {
      res = landweber(g, *op, lw);
    } catch (const DivergenceDetected& e) {
      s.manifest.set("gamma", lw.step_size);
      s.manifest.set("status", std::string("diverged"));
      s.manifest.write(s.path("manifest.txt"));
      throw;
    }
    for (const auto& [k, img] : res.snapshots) write_image(s.path(snapshot_name(k) + ".txt"), img);
    {
      std::FILE* f = std::fopen(s.path("residuals.csv").c_str(), "w");
      if (!f) throw ValidationError("cannot write " + s.path("residuals.csv"));
      std::fputs("iteration,residual\n", f);
      for (std::size_t k = 0; k < res.residuals.size(); ++k)
        std::fprintf(f, "%zu,%s\n", k, format_double(res.residuals[k]).c_str());
      std::fclose(f);
    }
    final = std::move(res.final);
    s.manifest.set("gamma", res.step_size);
    s.manifest.set("n_iters", static_cast<long long>(rc.iterations));
    s.manifest.set("final_residual", res.residuals.back());
  }
  write_image_pair(s, "final", final);

  if (truth) {
    write_image_pair(s, "phantom", *truth);
    const GridImage err = error_map(*truth, final);
    write_image_pair(s, "error", err);
    if (l2_norm(*truth) > 0.0) s.manifest.set("relative_error", relative_error(*truth, final));
    s.manifest.set("linf_error", max_abs(err));
  }
  if (s.cfg.predict.caustic) {
    CausticOptions co;
    co.n_samples = s.cfg.predict.n_samples;
    write_caustic_csv(s.path("caustic.csv"), caustic_curve(s.cfg.predict.source, s.boundary, co));
  }
  s.manifest.set("status", std::string("ok"));
  s.manifest.write(s.path("manifest.txt"));
  log << "reconstruct: " << op->describe() << " " << rc.method;
  if (truth) log << ", relative error " << s.manifest.get("relative_error") << ", max error " << s.manifest.get("linf_error");
  log << " -> " << s.out.string() << '\n';
  return kExitOk;
}

int cmd_predict(const RunOptions& opt, std::ostream& log) {
  Session s = open_session(opt, "predict");
  const PredictConfig& p = s.cfg.predict;
  const bool circle = s.cfg.boundary.kind == "circle";
  int outputs = 0;

  if (p.caustic) {
    CausticOptions co;
    co.n_samples = p.n_samples;
    const auto samples = caustic_curve(p.source, s.boundary, co);
    write_caustic_csv(s.path("caustic.csv"), samples);
    std::size_t ok = 0;
    for (const auto& c : samples) ok += c.flag == SampleFlag::ok ? 1 : 0;
    s.manifest.set("caustic_points", static_cast<long long>(ok));
    ++outputs;
  }
  if (p.locus) {
    if (!circle) throw ValidationError("config [predict] locus: needs a circular boundary");
    const TangentLocus locus = tangent_conjugate_locus(p.source, s.cfg.boundary.radius, p.n_samples);
    write_locus_csv(s.path("locus.csv"), locus);
    s.manifest.set("locus_zeros", static_cast<long long>(locus.zeros.size()));
    ++outputs;
  }
  if (p.chain) {
    if (!circle) throw ValidationError("config [predict] chain: needs a circular boundary");
    const ConjugateChain chain = conjugate_chain(p.chain_start, s.cfg.boundary.radius, p.max_index);
    write_chain_csv(s.path("chain.csv"), chain);
    s.manifest.set("chain_radial", std::string(is_radial(p.chain_start, s.cfg.boundary.radius) ? "true" : "false"));
    s.manifest.set("chain_status", std::string(chain.complete() ? "complete" : "incomplete"));
    s.manifest.set("chain_positive", to_string(chain.positive.status));
    s.manifest.set("chain_negative", to_string(chain.negative.status));
    ++outputs;
  }
  if (p.polygon_n_max > 0) {
    const auto radii = polygon_artifact_radii(p.polygon_n_max);
    write_radii_csv(s.path("radii.csv"), radii);
    s.manifest.set("polygon_radii", static_cast<long long>(radii.size()));
    ++outputs;
  }
  if (outputs == 0) throw ValidationError("config [predict]: nothing requested (caustic, locus, chain, polygon_n_max)");
  s.manifest.write(s.path("manifest.txt"));
  log << "predict: " << outputs << " output(s) -> " << s.out.string() << '\n';
  return kExitOk;
}

}  // namespace brt::cli
