#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "brt/config.hpp"
#include "brt/errors.hpp"
#include "brt/io.hpp"
#include "brt/reconstruct.hpp"

namespace brt {

namespace pt = boost::property_tree;

namespace {

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  double num(const std::string& key, double def) {
    const auto raw = text(key);
    if (!raw) return def;
    double v = 0.0;
    const char* b = raw->data();
    const char* e = b + raw->size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) fail(key, "expected a finite number, got '" + *raw + "'");
    return v;
  }
  int integer(const std::string& key, int def) {
    const double v = num(key, def);
    if (v != std::floor(v)) fail(key, "expected an integer");
    return static_cast<int>(v);
  }
  bool flag(const std::string& key, bool def) {
    const auto raw = text(key);
    if (!raw) return def;
    if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
    if (*raw == "false" || *raw == "0" || *raw == "no") return false;
    fail(key, "expected true or false");
    return def;
  }
  std::string str(const std::string& key, const std::string& def) {
    const auto raw = text(key);
    return raw ? *raw : def;
  }
  std::string choice(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
    const std::string v = str(key, def);
    for (const char* a : allowed)
      if (v == a) return v;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    fail(key, "'" + v + "' is not one of: " + list);
    return v;
  }
  /// Rejects keys that were never read (typos).
  void finish() const {
    if (!tree_) return;
    for (const auto& [k, _] : *tree_)
      if (!seen_.count(k)) throw ValidationError("config [" + name_ + "]: unknown key '" + k + "'");
  }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ValidationError("config [" + name_ + "] " + key + ": " + msg);
  }

 private:
  std::optional<std::string> text(const std::string& key) {
    seen_.insert(key);
    if (!tree_) return std::nullopt;
    const auto v = tree_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return *v;
  }

  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> seen_;
};

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

PhantomSpec parse_phantom(Section& s) {
  const std::string kind = s.choice("kind", "gaussian", {"gaussian", "coherent", "shepp_logan"});
  const Vec2 c{s.num("cx", 0.0), s.num("cy", 0.0)};
  if (kind == "gaussian") {
    GaussianSpec g{c, s.num("sigma", 0.03), s.num("amplitude", 1.0)};
    if (!(g.sigma > 0.0)) s.fail("sigma", "must be positive");
    return g;
  }
  if (kind == "coherent") {
    CoherentSpec g;
    g.center = c;
    g.theta = s.num("theta", 0.0);
    g.sigma = s.num("sigma", 0.05);
    g.wavenumber = s.num("wavenumber", 80.0);
    g.amplitude = s.num("amplitude", 1.0);
    g.support_radius = s.num("support_radius", 0.0);
    if (!(g.sigma > 0.0)) s.fail("sigma", "must be positive");
    if (g.wavenumber < 0.0) s.fail("wavenumber", "must be nonnegative");
    return g;
  }
  SheppLoganSpec g{c, s.num("rotation", 0.0), s.num("scale", 1.0)};
  if (!(g.scale > 0.0)) s.fail("scale", "must be positive");
  return g;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config syntax error: ") + e.what());
  }

  ExperimentConfig cfg;
  std::set<std::string> known{"boundary", "family", "grid", "reconstruction", "predict", "run"};

  Section b(child(root, "boundary"), "boundary");
  cfg.boundary.kind = b.choice("kind", "circle", {"circle", "ellipse", "parabola", "curve"});
  cfg.boundary.radius = b.num("radius", 1.0);
  cfg.boundary.a = b.num("a", 1.0);
  cfg.boundary.b = b.num("b", 1.0);
  cfg.boundary.focal = b.num("focal", 1.0);
  cfg.boundary.extent = b.num("extent", 4.0);
  cfg.boundary.file = b.str("file", "");
  if (cfg.boundary.kind == "curve") {
    if (cfg.boundary.file.empty()) b.fail("file", "required for kind = curve");
    const auto path = std::filesystem::path(base_dir) / cfg.boundary.file;
    if (!std::filesystem::exists(path)) b.fail("file", "'" + path.string() + "' does not exist");
  }
  b.finish();

  Section f(child(root, "family"), "family");
  cfg.family.kind = f.choice("kind", "half-plane-incoming",
                             {"full", "half-plane-incoming", "arc", "local", "parallel", "radon"});
  cfg.family.tau_min = f.num("tau_min", 0.0);
  cfg.family.tau_max = f.num("tau_max", 0.0);
  cfg.family.s0 = f.num("s0", 0.0);
  cfg.family.alpha0 = f.num("alpha0", 0.0);
  cfg.family.s_half = f.num("s_half", 0.0);
  cfg.family.alpha_half = f.num("alpha_half", 0.0);
  cfg.family.offset = f.num("offset", 0.0);
  f.finish();

  Section g(child(root, "grid"), "grid");
  cfg.grid.n = g.integer("n", 256);
  cfg.grid.half_width = g.num("half_width", 1.0);
  cfg.grid.n_alpha = g.integer("n_alpha", 360);
  cfg.grid.s_max = g.num("s_max", 0.0);
  if (cfg.grid.n < 8) g.fail("n", "must be at least 8");
  if (cfg.grid.n_alpha < 4) g.fail("n_alpha", "must be at least 4");
  if (!(cfg.grid.half_width > 0.0)) g.fail("half_width", "must be positive");
  if (cfg.grid.s_max < 0.0) g.fail("s_max", "must be nonnegative");
  g.finish();

  Section r(child(root, "reconstruction"), "reconstruction");
  cfg.reconstruction.method = r.choice("method", "fbp", {"fbp", "landweber"});
  cfg.reconstruction.iterations = r.integer("iterations", 100);
  cfg.reconstruction.step_size = r.num("step_size", 0.0);
  cfg.reconstruction.record_every = r.integer("record_every", 0);
  cfg.reconstruction.support = r.choice("support", "none", {"none", "domain", "disk"});
  cfg.reconstruction.support_radius = r.num("support_radius", 0.0);
  cfg.reconstruction.support_center = {r.num("support_cx", 0.0), r.num("support_cy", 0.0)};
  if (cfg.reconstruction.iterations < 0) r.fail("iterations", "must be nonnegative");
  if (cfg.reconstruction.step_size < 0.0) r.fail("step_size", "must be nonnegative");
  r.finish();

  Section p(child(root, "predict"), "predict");
  cfg.predict.caustic = p.flag("caustic", false);
  cfg.predict.source = {p.num("source_x", 0.0), p.num("source_y", 0.0)};
  cfg.predict.n_samples = p.integer("n_samples", 720);
  cfg.predict.locus = p.flag("locus", false);
  cfg.predict.chain = p.flag("chain", false);
  cfg.predict.chain_start = {{p.num("chain_x", 0.0), p.num("chain_y", 0.0)},
                             {p.num("chain_xi_x", 0.0), p.num("chain_xi_y", 1.0)}};
  cfg.predict.max_index = p.integer("max_index", kDefaultChainLength);
  cfg.predict.polygon_n_max = p.integer("polygon_n_max", 0);
  if (cfg.predict.n_samples < 2) p.fail("n_samples", "must be at least 2");
  p.finish();

  Section run(child(root, "run"), "run");
  cfg.output_dir = run.str("output_dir", "out");
  const int seed = run.integer("seed", 1);
  if (seed < 0) run.fail("seed", "must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.threads = run.integer("threads", 0);
  run.finish();

  for (const auto& [name, tree] : root) {
    if (name.rfind("phantom", 0) == 0) {
      Section ps(&tree, name);
      cfg.phantoms.push_back(parse_phantom(ps));
      const Vec2 c = center_of(cfg.phantoms.back());
      if (std::abs(c.x) > cfg.grid.half_width || std::abs(c.y) > cfg.grid.half_width)
        ps.fail("cx", "phantom center lies outside the image window");
      ps.finish();
    } else if (!known.count(name)) {
      throw ValidationError("config: unknown section [" + name + "]");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  const auto d = [](double v) { return format_double(v); };
  const auto b = [](bool v) { return v ? "true" : "false"; };
  o << "[boundary]\nkind = " << c.boundary.kind << "\nradius = " << d(c.boundary.radius) << "\na = " << d(c.boundary.a)
    << "\nb = " << d(c.boundary.b) << "\nfocal = " << d(c.boundary.focal) << "\nextent = " << d(c.boundary.extent) << '\n';
  if (!c.boundary.file.empty()) o << "file = " << c.boundary.file << '\n';
  o << "\n[family]\nkind = " << c.family.kind << "\ntau_min = " << d(c.family.tau_min) << "\ntau_max = "
    << d(c.family.tau_max) << "\ns0 = " << d(c.family.s0) << "\nalpha0 = " << d(c.family.alpha0)
    << "\ns_half = " << d(c.family.s_half) << "\nalpha_half = " << d(c.family.alpha_half)
    << "\noffset = " << d(c.family.offset) << '\n';
  o << "\n[grid]\nn = " << c.grid.n << "\nhalf_width = " << d(c.grid.half_width) << "\nn_alpha = " << c.grid.n_alpha
    << "\ns_max = " << d(c.grid.s_max) << '\n';
  const auto& r = c.reconstruction;
  o << "\n[reconstruction]\nmethod = " << r.method << "\niterations = " << r.iterations << "\nstep_size = "
    << d(r.step_size) << "\nrecord_every = " << r.record_every << "\nsupport = " << r.support
    << "\nsupport_radius = " << d(r.support_radius) << "\nsupport_cx = " << d(r.support_center.x)
    << "\nsupport_cy = " << d(r.support_center.y) << '\n';
  const auto& p = c.predict;
  o << "\n[predict]\ncaustic = " << b(p.caustic) << "\nsource_x = " << d(p.source.x) << "\nsource_y = "
    << d(p.source.y) << "\nn_samples = " << p.n_samples << "\nlocus = " << b(p.locus) << "\nchain = " << b(p.chain)
    << "\nchain_x = " << d(p.chain_start.x.x) << "\nchain_y = " << d(p.chain_start.x.y)
    << "\nchain_xi_x = " << d(p.chain_start.xi.x) << "\nchain_xi_y = " << d(p.chain_start.xi.y)
    << "\nmax_index = " << p.max_index << "\npolygon_n_max = " << p.polygon_n_max << '\n';
  o << "\n[run]\noutput_dir = " << c.output_dir << "\nseed = " << c.seed << "\nthreads = " << c.threads << '\n';
  for (std::size_t i = 0; i < c.phantoms.size(); ++i) {
    o << "\n[phantom" << i << "]\n";
    const auto& spec = c.phantoms[i];
    if (const auto* g = std::get_if<GaussianSpec>(&spec)) {
      o << "kind = gaussian\ncx = " << d(g->center.x) << "\ncy = " << d(g->center.y) << "\nsigma = " << d(g->sigma)
        << "\namplitude = " << d(g->amplitude) << '\n';
    } else if (const auto* h = std::get_if<CoherentSpec>(&spec)) {
      o << "kind = coherent\ncx = " << d(h->center.x) << "\ncy = " << d(h->center.y) << "\ntheta = " << d(h->theta)
        << "\nsigma = " << d(h->sigma) << "\nwavenumber = " << d(h->wavenumber) << "\namplitude = "
        << d(h->amplitude) << "\nsupport_radius = " << d(h->support_radius) << '\n';
    } else {
      const auto& s = std::get<SheppLoganSpec>(spec);
      o << "kind = shepp_logan\ncx = " << d(s.center.x) << "\ncy = " << d(s.center.y) << "\nrotation = "
        << d(s.rotation) << "\nscale = " << d(s.scale) << '\n';
    }
  }
  return o.str();
}

Boundary make_boundary(const BoundaryConfig& cfg, const std::string& base_dir) {
  if (cfg.kind == "circle") return Boundary::circle(cfg.radius);
  if (cfg.kind == "ellipse") return Boundary::ellipse(cfg.a, cfg.b);
  if (cfg.kind == "parabola") return Boundary::parabola(cfg.focal, cfg.extent);
  const auto path = std::filesystem::path(base_dir) / cfg.file;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open curve file '" + path.string() + "'");
  std::vector<Vec2> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    Vec2 v;
    if (!(ls >> v.x >> v.y)) {
      if (pts.empty()) continue;  // header row
      throw ValidationError("curve file '" + path.string() + "': bad row '" + line + "'");
    }
    pts.push_back(v);
  }
  if (pts.size() < 4) throw ValidationError("curve file needs at least 4 vertices");
  return Boundary::sampled(std::move(pts));
}

ImageLayout make_image_layout(const GridConfig& cfg) { return {cfg.n, cfg.half_width}; }

SinogramLayout make_sinogram_layout(const GridConfig& cfg) {
  return {cfg.n, cfg.n_alpha, cfg.s_max > 0.0 ? cfg.s_max : cfg.half_width};
}

std::shared_ptr<LinearOperator> make_operator(const ExperimentConfig& cfg, const Boundary& boundary) {
  const ImageLayout il = make_image_layout(cfg.grid);
  const SinogramLayout sl = make_sinogram_layout(cfg.grid);
  const auto& f = cfg.family;
  if (f.kind == "radon") return std::make_shared<RadonOperator>(il, sl);
  if (f.kind == "parallel") return std::make_shared<ParallelRayOperator>(f.offset, il, sl);
  FamilySpec fam;
  if (f.kind == "full") fam = FamilySpec::full();
  else if (f.kind == "half-plane-incoming") fam = FamilySpec::half_plane_incoming();
  else if (f.kind == "arc") fam = FamilySpec::arc(f.tau_min, f.tau_max);
  else fam = FamilySpec::local(f.s0, f.alpha0, f.s_half, f.alpha_half);
  return std::make_shared<BrokenRayOperator>(boundary, fam, il, sl);
}

std::vector<char> make_support_mask(const ExperimentConfig& cfg, const Boundary& boundary) {
  const ImageLayout il = make_image_layout(cfg.grid);
  const auto& r = cfg.reconstruction;
  if (r.support == "domain") return domain_mask(boundary, il);
  if (r.support == "disk") {
    if (!(r.support_radius > 0.0)) throw ValidationError("config [reconstruction] support_radius: must be positive");
    return disk_mask(il, r.support_center, r.support_radius);
  }
  return {};
}

}  // namespace brt
