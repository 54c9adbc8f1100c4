#include <algorithm>
#include <cmath>
#include <numeric>

#include "brt/conjugate.hpp"
#include "brt/errors.hpp"

namespace brt {

std::string to_string(ChainStatus status) {
  switch (status) {
    case ChainStatus::complete: return "complete";
    case ChainStatus::incomplete: return "incomplete";
    case ChainStatus::truncated: return "truncated";
  }
  return "?";
}

bool parabola_criterion(double a, double d, double x0) {
  if (!(a > 0.0) || !(d > 0.0)) throw ValidationError("parabola criterion needs a > 0 and d > 0");
  return (a - d) * (0.75 * x0 * x0 - a * d) > 0.0;
}

std::vector<PolygonRadius> polygon_artifact_radii(int n_max) {
  if (n_max < 2) throw ValidationError("polygon_artifact_radii needs n_max >= 2");
  std::vector<PolygonRadius> out;
  for (int n = 2; n <= n_max; ++n) {
    const int p = 2 * n;
    for (int q = 1; 2 * q < p; q += 2) {
      if (std::gcd(p, q) != 1) continue;
      out.push_back({p, q, std::cos(q * kPi / p)});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PolygonRadius& x, const PolygonRadius& y) { return x.radius > y.radius; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const PolygonRadius& x, const PolygonRadius& y) {
                          return std::abs(x.radius - y.radius) < 1e-12;
                        }),
            out.end());
  return out;
}

namespace {

// Oriented line through x with w = xi / |xi|.
LineCoords conormal_line(const Covector& cv) {
  return LineCoords::through(cv.x, std::atan2(cv.xi.y, cv.xi.x) - 0.5 * kPi);
}

double coordinate_on(const Vec2& x, const LineCoords& line, double radius) {
  const double half = std::sqrt(std::max(0.0, radius * radius - line.s * line.s));
  return -dot(x, line.v()) / half;
}

bool radial_on(const Vec2& x, const LineCoords& line, double radius) {
  const double r = norm(x);
  if (r < 1e-12 * radius) return true;
  return std::abs(dot(x, line.v())) < kRadialTolerance * r;
}

}  // namespace

bool is_radial(const Covector& cv, double radius) {
  if (norm(cv.xi) == 0.0) throw ValidationError("covector has zero frequency");
  return radial_on(cv.x, conormal_line(cv), radius);
}

double chord_coordinate(const Covector& cv, double radius) {
  return coordinate_on(cv.x, conormal_line(cv), radius);
}

std::vector<double> mirror_recurrence(double a0, int steps, int direction) {
  std::vector<double> out{a0};
  const double shift = direction >= 0 ? 2.0 : -2.0;
  while (static_cast<int>(out.size()) < steps && std::abs(out.back()) < 1.0) {
    const double a = out.back();
    out.push_back(a == 0.0 ? 0.0 : 1.0 / (1.0 / a + shift));
  }
  return out;
}

ConjugateChain conjugate_chain(const Covector& cv, double radius, int max_index) {
  if (norm(cv.x) >= radius) throw ValidationError("chain start must lie strictly inside the disk");
  if (norm(cv.xi) == 0.0) throw ValidationError("covector has zero frequency");
  const Boundary disk = Boundary::circle(radius);

  ConjugateChain chain;
  const LineCoords line0 = conormal_line(cv);
  chain.entries.push_back({0, cv, line0, coordinate_on(cv.x, line0, radius)});

  const auto walk = [&](LineCoords line, Covector cur, int sign, ChainDirection& status) {
    bool radial = radial_on(cur.x, line, radius);
    std::vector<ChainEntry> found;
    for (int i = 1; i <= max_index; ++i) {
      std::optional<Covector> next;
      ReflectionEvent ev;
      try {
        ev = reflect(disk, line, cur.x);
        next = conjugate_covector(cur, ev);
      } catch (const GrazingIncidence&) {
        status = {ChainStatus::truncated, sign * (i - 1), true};
        return found;
      }
      if (!next || norm(next->x) >= radius) {
        status = {ChainStatus::incomplete, sign * i, false};
        return found;
      }
      line = ev.line_out;
      cur = *next;
      radial = radial && radial_on(cur.x, line, radius);
      found.push_back({sign * i, cur, line, coordinate_on(cur.x, line, radius)});
    }
    status = {radial ? ChainStatus::complete : ChainStatus::truncated, sign * max_index, false};
    return found;
  };

  const auto fwd = walk(line0, cv, 1, chain.positive);
  // Backward walk: same covector on the reversed line.
  const auto bwd = walk(line0.reversed(), cv, -1, chain.negative);

  for (const auto& e : fwd) chain.entries.push_back(e);
  for (const auto& e : bwd) chain.entries.push_back(e);
  std::sort(chain.entries.begin(), chain.entries.end(),
            [](const ChainEntry& x, const ChainEntry& y) { return x.index < y.index; });
  return chain;
}

}  // namespace brt
