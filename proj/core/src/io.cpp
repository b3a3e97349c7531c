#include "elastinv/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "elastinv/errors.hpp"

namespace elastinv {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
  if (!j.contains("schema") || j["schema"] != kSchemaVersion) {
    throw ValidationError(std::string(what) + ": missing or unsupported \"schema\"");
  }
  return j;
}

template <class T>
T get(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) {
    throw ValidationError(std::string(what) + ": missing field \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": bad field \"" + key + "\": " + e.what());
  }
}

json vec3_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw ValidationError(std::string(what) + ": expected a 3-vector");
  }
  try {
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string surface_to_json(const SurfaceParam& sp) {
  sp.validate();
  json j;
  j["schema"] = kSchemaVersion;
  j["N"] = sp.N;
  j["C"] = sp.C;
  return j.dump(1);
}

SurfaceParam surface_from_json(const std::string& text) {
  const json j = parse(text, "surface");
  const int N = get<int>(j, "N", "surface");
  return SurfaceParam(N, get<std::vector<double>>(j, "C", "surface"));
}

std::string measurement_to_json(const MeasurementSet& ms) {
  ms.validate();
  json j;
  j["schema"] = kSchemaVersion;
  j["R"] = ms.R;
  j["omega"] = ms.medium.omega;
  j["lambda"] = ms.medium.lambda;
  j["mu"] = ms.medium.mu;
  json inc;
  inc["kind"] = ms.incident.kind == WaveKind::Compressional ? "P" : "S";
  inc["direction"] = vec3_json(ms.incident.direction);
  if (ms.incident.kind == WaveKind::Shear) inc["polarization"] = vec3_json(ms.incident.polarization);
  j["incident"] = inc;
  json pts = json::array(), u = json::array();
  for (std::size_t k = 0; k < ms.points.size(); ++k) {
    pts.push_back(vec3_json(ms.points[k]));
    json row = json::array();
    for (int c = 0; c < 3; ++c) row.push_back(json::array({ms.u[k](c).real(), ms.u[k](c).imag()}));
    u.push_back(row);
  }
  j["points"] = pts;
  j["u"] = u;
  j["delta"] = ms.delta;
  j["seed"] = ms.seed;
  return j.dump(1);
}

MeasurementSet measurement_from_json(const std::string& text) {
  const char* what = "measurement";
  const json j = parse(text, what);
  MeasurementSet ms;
  ms.R = get<double>(j, "R", what);
  try {
    ms.medium = Medium(get<double>(j, "lambda", what), get<double>(j, "mu", what),
                       get<double>(j, "omega", what));
  } catch (const DomainError& e) {
    throw ValidationError(std::string("measurement: ") + e.what());
  }
  const json inc = get<json>(j, "incident", what);
  const std::string kind = get<std::string>(inc, "kind", what);
  const Vec3 d = vec3_from(get<json>(inc, "direction", what), what);
  if (kind == "P") {
    ms.incident = IncidentWave::compressional(d);
  } else if (kind == "S") {
    ms.incident = IncidentWave::shear(d, vec3_from(get<json>(inc, "polarization", what), what));
  } else {
    throw ValidationError("measurement: incident kind must be \"P\" or \"S\"");
  }
  for (const auto& p : get<json>(j, "points", what)) ms.points.push_back(vec3_from(p, what));
  for (const auto& row : get<json>(j, "u", what)) {
    if (!row.is_array() || row.size() != 3) throw ValidationError("measurement: bad u entry");
    CVec3 v;
    for (int c = 0; c < 3; ++c) {
      if (!row[c].is_array() || row[c].size() != 2) {
        throw ValidationError("measurement: u components must be [re, im]");
      }
      v(c) = cdouble(row[c][0].get<double>(), row[c][1].get<double>());
    }
    ms.u.push_back(v);
  }
  ms.delta = j.value("delta", 0.0);
  ms.seed = j.value("seed", std::uint64_t{0});
  ms.validate();
  return ms;
}

std::string inversion_config_to_json(const InversionConfig& cfg) {
  json j;
  j["schema"] = kSchemaVersion;
  j["omegas"] = cfg.omegas;
  j["iterations"] = cfg.iterations;
  j["tau0"] = cfg.tau0;
  j["R0"] = cfg.R0;
  j["order_offset"] = cfg.order_offset;
  j["backtracking"] = cfg.backtracking;
  j["sweep_directions"] = cfg.sweep_directions;
  j["max_halvings"] = cfg.max_halvings;
  if (cfg.solver.order >= 0) j["forward_order"] = cfg.solver.order;
  else j["forward_order"] = cfg.forward_order ? "inversion" : "default";
  j["tolerance"] = cfg.solver.tolerance;
  j["rcond"] = cfg.solver.rcond;
  return j.dump(1);
}

InversionConfig inversion_config_from_json(const std::string& text) {
  const char* what = "inversion config";
  const json j = parse(text, what);
  InversionConfig cfg;
  cfg.omegas = j.value("omegas", std::vector<double>{});
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.tau0 = j.value("tau0", cfg.tau0);
  cfg.R0 = j.value("R0", cfg.R0);
  cfg.order_offset = j.value("order_offset", cfg.order_offset);
  cfg.backtracking = j.value("backtracking", cfg.backtracking);
  cfg.sweep_directions = j.value("sweep_directions", cfg.sweep_directions);
  cfg.max_halvings = j.value("max_halvings", cfg.max_halvings);
  cfg.solver.tolerance = j.value("tolerance", cfg.solver.tolerance);
  cfg.solver.rcond = j.value("rcond", cfg.solver.rcond);
  if (j.contains("forward_order")) {
    const json& fo = j["forward_order"];
    if (fo.is_number_integer()) {
      cfg.solver.order = fo.get<int>();
    } else if (fo == "inversion") {
      cfg.forward_order = inversion_forward_order;
    } else if (fo != "default") {
      throw ValidationError("inversion config: forward_order must be an integer, "
                            "\"default\" or \"inversion\"");
    }
  }
  return cfg;
}

void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& history) {
  os << "stage,iteration,omega,f,step,residual,gradient_norm\n";
  os.precision(17);
  for (const auto& r : history) {
    os << r.stage << ',' << r.iteration << ',' << r.omega << ',' << r.f << ',' << r.step << ','
       << r.residual << ',' << r.gradient_norm << '\n';
  }
}

std::vector<Vec3> directions_from_json(const std::string& text) {
  const json j = parse(text, "directions");
  std::vector<Vec3> out;
  for (const auto& d : get<json>(j, "directions", "directions")) {
    const Vec3 v = vec3_from(d, "directions");
    if (!(v.norm() > 0.0)) throw ValidationError("directions: zero vector");
    out.push_back(v.normalized());
  }
  if (out.empty()) throw ValidationError("directions: empty list");
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
  if (!out) throw ValidationError("write failed for " + path);
}

}  // namespace elastinv
