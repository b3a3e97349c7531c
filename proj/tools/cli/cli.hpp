#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <elastinv/elastinv.hpp>

namespace elastinv::cli {

/// Options shared by the subcommands. Defaults: lambda = 2, mu = 1, R = 1,
/// frequencies 1:3:1, delta = 0.05, seed = 1, single direction (0, 1, 0).
struct RunConfig {
  double lambda = 2.0;
  double mu = 1.0;
  double radius = 1.0;
  std::string freqs = "1:3:1";
  double noise = 0.05;
  std::uint64_t seed = 1;
  std::string directions = "preset:y";
  std::string out = ".";

  std::string surface = "ellipsoid:0.6,0.75,0.9";
  int surface_order = -1;  ///< order for surface presets; < 0 picks per preset
  int points = 100;
  std::string forward_order = "default";
  double tolerance = -1.0;  ///< < 0 keeps the subcommand default

  // invert
  std::vector<std::string> data;
  std::string config;  ///< inversion config JSON
  int iterations = 100;
  double tau0 = 0.005;
  double R0 = 0.5;
  int order_offset = 0;
  bool backtracking = false;
  bool sweep = false;
  std::string truth;
  bool use_freqs = false;  ///< --freqs given explicitly

  // check
  bool quick = false;
};

/// "a:b:step" (inclusive, step > 0) or a comma list.
std::vector<double> parse_frequencies(const std::string& spec);

/// "lambda,mu".
std::pair<double, double> parse_medium(const std::string& spec);

/// "preset:cube-faces", "preset:y", an inline "x,y,z", or a JSON file.
std::vector<Vec3> resolve_directions(const std::string& spec);

/// Surface preset string or a surface JSON file.
SurfaceParam resolve_surface(const std::string& spec, int order);

/// Noise seed for the i-th synthesized file, derived from the run seed.
std::uint64_t derived_seed(std::uint64_t seed, std::size_t index);

/// "default", "inversion" or a fixed modal order.
void apply_forward_order(const std::string& spec, InversionConfig& cfg);

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_invert(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_jacobian_dump(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Exit codes: 0 success, 1 usage or validation
/// error, 2 solver failure, 3 failed check or aborted inversion.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace elastinv::cli
