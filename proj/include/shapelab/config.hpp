#pragma once

#include "shapelab/energy.hpp"
#include "shapelab/geometry.hpp"
#include "shapelab/optimizer.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shapelab {

// Configuration files are INI: flat `key = value` records grouped in
// sections, one nesting level. Unknown sections or keys are rejected.
//
//   [domain]   center_x center_y r0 a<k> b<k>      (k = 1..32)
//   [energy]   v vmax eta torsion tau c_nl c0 h_norm
//   [mesh]     h rings grid
//   [optimizer] max_modes initial_step armijo_factor sufficient_decrease
//              max_backtracks max_iter grad_tol volume h_coarse h_fine
//              fine_iterations fd_step
//   [sweep]    modes amplitudes                    (comma separated)
//   [run]      seed jobs output_dir

struct SweepConfig {
  std::vector<int> modes = {2, 3, 4, 5, 6};
  std::vector<double> amplitudes = {0.05, 0.025};
};

struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string output_dir = ".";
};

struct ExperimentConfig {
  std::optional<StarDomain> domain;
  EnergyParams energy;
  Resolution mesh;
  OptimizerConfig optimizer;
  SweepConfig sweep;
  RunConfig run;
};

/// Throws ValidationError on unreadable files, syntax errors, unknown keys or
/// malformed values.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<stream>");

/// Reads a file whose [domain] section describes a StarDomain.
StarDomain load_domain(const std::string& path);

/// Writes the [domain] section in a form load_domain reads back exactly.
void write_domain(std::ostream& out, const StarDomain& d);
std::string domain_text(const StarDomain& d);

/// Canonical text of every effective parameter; two configs with equal text
/// describe the same experiment.
std::string canonical_text(const ExperimentConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace shapelab
