#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "brt/errors.hpp"
#include "brt/io.hpp"

namespace brt {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  return in;
}

// Reads whitespace-separated numbers, accepting `nan`.
class NumberReader {
 public:
  NumberReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  double next() {
    std::string tok;
    if (!(in_ >> tok)) throw ValidationError("'" + path_ + "': unexpected end of file");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw ValidationError("'" + path_ + "': bad number '" + tok + "'");
    return v;
  }
  int next_int() {
    const double v = next();
    if (v != std::floor(v) || v < 1) throw ValidationError("'" + path_ + "': expected a positive integer");
    return static_cast<int>(v);
  }

 private:
  std::istream& in_;
  std::string path_;
};

}  // namespace

void write_image(const std::string& path, const GridImage& f) {
  auto out = open_out(path);
  out << f.n() << ' ' << format_double(f.x_min()) << ' ' << format_double(f.x_max()) << ' '
      << format_double(f.y_min()) << ' ' << format_double(f.y_max()) << '\n';
  for (int i = f.n() - 1; i >= 0; --i) {
    for (int j = 0; j < f.n(); ++j) out << (j ? " " : "") << format_double(f.at(i, j));
    out << '\n';
  }
}

GridImage read_image(const std::string& path) {
  auto in = open_in(path);
  NumberReader rd(in, path);
  const int n = rd.next_int();
  const double x0 = rd.next(), x1 = rd.next(), y0 = rd.next(), y1 = rd.next();
  if (std::abs(x0 + x1) > 1e-12 || std::abs(y0 + y1) > 1e-12 || std::abs((x1 - x0) - (y1 - y0)) > 1e-12 || x1 <= 0)
    throw ValidationError("'" + path + "': window must be square and centered at the origin");
  GridImage f(ImageLayout{n, x1});
  for (int i = n - 1; i >= 0; --i)
    for (int j = 0; j < n; ++j) {
      f.at(i, j) = rd.next();
      if (!std::isfinite(f.at(i, j))) throw ValidationError("'" + path + "': image samples must be finite");
    }
  return f;
}

void write_sinogram(const std::string& path, const Sinogram& g) {
  auto out = open_out(path);
  out << g.layout.n_s << ' ' << g.layout.n_alpha << ' ' << format_double(g.layout.s_max) << '\n';
  for (int j = 0; j < g.layout.n_alpha; ++j) {
    for (int k = 0; k < g.layout.n_s; ++k) out << (k ? " " : "") << format_double(g.at(j, k));
    out << '\n';
  }
}

Sinogram read_sinogram(const std::string& path) {
  auto in = open_in(path);
  NumberReader rd(in, path);
  SinogramLayout l;
  l.n_s = rd.next_int();
  l.n_alpha = rd.next_int();
  l.s_max = rd.next();
  if (!(l.s_max > 0.0)) throw ValidationError("'" + path + "': s_max must be positive");
  Sinogram g(l);
  for (double& v : g.data) {
    v = rd.next();
    if (std::isinf(v)) throw ValidationError("'" + path + "': sinogram samples must be finite or nan");
  }
  return g;
}

void write_pgm(const std::string& path, const GridImage& f) {
  const auto [lo_it, hi_it] = std::minmax_element(f.data.begin(), f.data.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << "P5\n" << f.n() << ' ' << f.n() << "\n65535\n";
  for (int i = f.n() - 1; i >= 0; --i)
    for (int j = 0; j < f.n(); ++j) {
      const auto q = static_cast<std::uint16_t>(std::lround(65535.0 * (f.at(i, j) - lo) / span));
      const char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
      out.write(bytes, 2);
    }
  auto side = open_out(path + ".scale");
  side << "min = " << format_double(lo) << "\nmax = " << format_double(hi) << "\nmaxval = 65535\n";
}

void write_caustic_csv(const std::string& path, const std::vector<CausticSample>& samples) {
  auto out = open_out(path);
  out << "alpha,t,x,y,flag\n";
  for (const auto& s : samples)
    out << format_double(s.alpha) << ',' << format_double(s.t) << ',' << format_double(s.point.x) << ','
        << format_double(s.point.y) << ',' << to_string(s.flag) << '\n';
}

void write_locus_csv(const std::string& path, const TangentLocus& locus) {
  auto out = open_out(path);
  out << "alpha,t,x,y,flag\n";
  for (const auto& s : locus.samples)
    out << format_double(s.alpha) << ',' << format_double(s.t) << ',' << format_double(s.point.x) << ','
        << format_double(s.point.y) << ',' << (s.on_locus ? "ok" : "none") << '\n';
  for (const auto& z : locus.zeros)
    out << format_double(z.alpha) << ",,,," << "zero:" << to_string(z.kind) << (z.simple ? ":simple" : ":multiple")
        << (z.on_locus ? "" : ":off_locus") << '\n';
}

void write_chain_csv(const std::string& path, const ConjugateChain& chain) {
  auto out = open_out(path);
  out << "index,x,y,xi_x,xi_y,status\n";
  for (const auto& e : chain.entries) {
    const ChainDirection& dir = e.index < 0 ? chain.negative : chain.positive;
    out << e.index << ',' << format_double(e.cv.x.x) << ',' << format_double(e.cv.x.y) << ','
        << format_double(e.cv.xi.x) << ',' << format_double(e.cv.xi.y) << ',';
    if (e.index == 0)
      out << (chain.complete() ? "complete" : "incomplete");
    else
      out << to_string(dir.status);
    out << '\n';
  }
  out << "# positive," << to_string(chain.positive.status) << ',' << chain.positive.index
      << (chain.positive.grazing ? ",grazing" : "") << '\n';
  out << "# negative," << to_string(chain.negative.status) << ',' << chain.negative.index
      << (chain.negative.grazing ? ",grazing" : "") << '\n';
}

void write_radii_csv(const std::string& path, const std::vector<PolygonRadius>& radii) {
  auto out = open_out(path);
  out << "p,q,radius\n";
  for (const auto& r : radii) out << r.p << ',' << r.q << ',' << format_double(r.radius) << '\n';
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }
void Manifest::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

std::string Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return {};
}

void Manifest::write(const std::string& path) const {
  auto out = open_out(path);
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

}  // namespace brt
