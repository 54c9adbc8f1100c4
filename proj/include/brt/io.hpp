#pragma once

// Text image/sinogram formats, PGM export, CSV tables and run manifests.

#include <string>
#include <utility>
#include <vector>

#include "brt/conjugate.hpp"
#include "brt/transforms.hpp"

namespace brt {

/// Header `n x_min x_max y_min y_max`, then n rows, top row (largest y) first.
void write_image(const std::string& path, const GridImage& f);
GridImage read_image(const std::string& path);

/// Header `n_s n_alpha s_max`, then n_alpha rows of n_s values; masked bins as `nan`.
void write_sinogram(const std::string& path, const Sinogram& g);
Sinogram read_sinogram(const std::string& path);

/// 16-bit binary PGM, min-max scaled; the scaling goes to `path + ".scale"`.
void write_pgm(const std::string& path, const GridImage& f);

void write_caustic_csv(const std::string& path, const std::vector<CausticSample>& samples);
void write_locus_csv(const std::string& path, const TangentLocus& locus);
void write_chain_csv(const std::string& path, const ConjugateChain& chain);
void write_radii_csv(const std::string& path, const std::vector<PolygonRadius>& radii);

/// Ordered key-value pairs written as `key = value` lines.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string get(const std::string& key) const;
  void write(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace brt
