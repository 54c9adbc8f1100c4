#pragma once

// Experiment configuration: INI-style sections of `key = value` pairs.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "brt/conjugate.hpp"
#include "brt/phantoms.hpp"
#include "brt/transforms.hpp"

namespace brt {

struct BoundaryConfig {
  std::string kind = "circle";  ///< circle | ellipse | parabola | curve
  double radius = 1.0;
  double a = 1.0;
  double b = 1.0;
  double focal = 1.0;
  double extent = 4.0;
  std::string file;  ///< curve: CSV of x,y vertices

  bool operator==(const BoundaryConfig&) const = default;
};

struct FamilyConfig {
  /// full | half-plane-incoming | arc | local | parallel | radon
  std::string kind = "half-plane-incoming";
  double tau_min = 0.0;
  double tau_max = 0.0;
  double s0 = 0.0;
  double alpha0 = 0.0;
  double s_half = 0.0;
  double alpha_half = 0.0;
  double offset = 0.0;  ///< parallel: d

  bool operator==(const FamilyConfig&) const = default;
};

struct GridConfig {
  int n = 256;
  double half_width = 1.0;
  int n_alpha = 360;
  double s_max = 0.0;  ///< 0 means the window half width

  bool operator==(const GridConfig&) const = default;
};

struct ReconstructionConfig {
  std::string method = "fbp";  ///< fbp | landweber
  int iterations = 100;
  double step_size = 0.0;      ///< 0 = power-iteration estimate
  int record_every = 0;
  std::string support = "none";  ///< none | domain | disk
  double support_radius = 0.0;
  Vec2 support_center;

  bool operator==(const ReconstructionConfig&) const = default;
};

struct PredictConfig {
  bool caustic = false;
  Vec2 source;
  int n_samples = 720;
  bool locus = false;
  bool chain = false;
  Covector chain_start{{0.0, 0.0}, {0.0, 1.0}};
  int max_index = kDefaultChainLength;
  int polygon_n_max = 0;  ///< 0 skips the polygon radii

  bool operator==(const PredictConfig& o) const {
    return caustic == o.caustic && source == o.source && n_samples == o.n_samples && locus == o.locus &&
           chain == o.chain && chain_start.x == o.chain_start.x && chain_start.xi == o.chain_start.xi &&
           max_index == o.max_index && polygon_n_max == o.polygon_n_max;
  }
};

struct ExperimentConfig {
  BoundaryConfig boundary;
  FamilyConfig family;
  GridConfig grid;
  std::vector<PhantomSpec> phantoms;
  ReconstructionConfig reconstruction;
  PredictConfig predict;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int threads = 0;  ///< 0 leaves the OpenMP default

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ValidationError with the offending section/key on bad input.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

Boundary make_boundary(const BoundaryConfig& cfg, const std::string& base_dir = ".");
ImageLayout make_image_layout(const GridConfig& cfg);
SinogramLayout make_sinogram_layout(const GridConfig& cfg);
std::shared_ptr<LinearOperator> make_operator(const ExperimentConfig& cfg, const Boundary& boundary);
std::vector<char> make_support_mask(const ExperimentConfig& cfg, const Boundary& boundary);

}  // namespace brt
