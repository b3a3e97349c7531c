#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "elastinv/forward.hpp"
#include "elastinv/geometry.hpp"
#include "elastinv/inverse.hpp"

namespace elastinv {

/// Every document carries "schema": 1; readers reject other versions.
inline constexpr int kSchemaVersion = 1;

std::string surface_to_json(const SurfaceParam& sp);
SurfaceParam surface_from_json(const std::string& text);

std::string measurement_to_json(const MeasurementSet& ms);
MeasurementSet measurement_from_json(const std::string& text);

/// Inversion settings that can be stored; the forward-order rule is encoded
/// as "default", "inversion" or a fixed integer.
std::string inversion_config_to_json(const InversionConfig& cfg);
InversionConfig inversion_config_from_json(const std::string& text);

/// stage,iteration,omega,f,step,residual,gradient_norm
void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& history);

/// Direction list: {"schema": 1, "directions": [[x, y, z], ...]}.
std::vector<Vec3> directions_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
/// Throws ValidationError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace elastinv
