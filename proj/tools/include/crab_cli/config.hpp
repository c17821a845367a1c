#pragma once

#include "crab/action.hpp"
#include "crab/cutoff.hpp"
#include "crab/discriminant.hpp"
#include "crab/geometry.hpp"
#include "crab/isotopy.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace crab::cli {

inline constexpr const char* kSchema = "crab/1";

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string name = "circle";
  int torus_dim = 2;
  std::vector<double> radii{1.0, 1.0};
};

struct IsotopyConfig {
  /// constant, sinusoidal or kinetic.
  std::string kind = "constant";
  double value = 1.0;
  SinusoidalParams sinusoidal{};
  KineticEnergyParams kinetic{};
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  int threads = 1;
  ModelConfig model;
  IsotopyConfig isotopy;

  double window_lo = 0.0;
  double window_hi = 5.0;
  std::vector<double> m_list{2, 4, 8, 16, 32};
  /// Rotation speed for the circle oracle; zero means "take it from the isotopy".
  double oracle_a = 0.0;
  /// Random samples for lift-check.
  int samples = 1000;
  /// growth on "discriminant" or "chords".
  std::string growth_source = "discriminant";

  SearchOptions search{};
  ChordOptions chord_search{};
  PathGrid path_grid{};
  ConstantsOptions constants{};
  NewtonOptions newton{};
  DescendOptions descend{};
  ProbeOptions probe{};

  std::vector<double> q0{0.0, 0.0};
  std::vector<double> q1{0.5, 0.0};

  double kappa_factor = 1.05;
  double R_factor = 1.05;

  /// Start η for descend; NaN means the first discriminant value in the window.
  double descend_eta = std::numeric_limits<double>::quiet_NaN();
  double perturbation = 1e-2;

  std::filesystem::path out_dir = "crab-out";
};

/// Parses the INI text. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

ModelPtr build_model(const ModelConfig& m);
IsotopySpec build_isotopy(const IsotopyConfig& c, const ContactModel& model);

}  // namespace crab::cli
