#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Eigenvalues>

namespace elastinv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ValidationError(what + ": bad number '" + s + "'");
  return v;
}

fs::path prepare_out_dir(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw ValidationError("cannot create output directory " + dir);
  return p;
}

std::string omega_tag(double omega) {
  std::ostringstream os;
  os << omega;
  return os.str();
}

SolverOptions solver_options(const RunConfig& cfg, double default_tolerance) {
  SolverOptions opt;
  opt.tolerance = cfg.tolerance >= 0.0 ? cfg.tolerance : default_tolerance;
  return opt;
}

// Modal order for a forward solve at `med`: "default", "inversion" or an integer.
int forward_order_for(const std::string& spec, const Medium& med, double R) {
  if (spec.empty() || spec == "default") return default_truncation(med, R);
  if (spec == "inversion") return inversion_forward_order(med, R);
  const double v = to_double(spec, "--forward-order");
  if (v < 1 || v != std::floor(v)) throw ValidationError("--forward-order must be a positive integer");
  return static_cast<int>(v);
}

void write_cross_sections(const fs::path& path, const SurfaceParam& sp) {
  std::ostringstream os;
  write_cross_sections_csv(os, Surface(sp));
  write_text_file(path.string(), os.str());
}

}  // namespace

std::vector<double> parse_frequencies(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ValidationError("--freqs expects a:b:step");
    const double a = to_double(parts[0], "--freqs"), b = to_double(parts[1], "--freqs");
    const double step = to_double(parts[2], "--freqs");
    if (!(step > 0.0) || b < a) throw ValidationError("--freqs needs step > 0 and b >= a");
    for (int i = 0;; ++i) {
      const double w = a + i * step;
      if (w > b + 1e-9 * step) break;
      out.push_back(w);
    }
  } else {
    for (const auto& tok : split(spec, ',')) out.push_back(to_double(tok, "--freqs"));
  }
  if (out.empty()) throw ValidationError("--freqs is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0)) throw ValidationError("--freqs: frequencies must be positive");
    if (i > 0 && !(out[i] > out[i - 1])) {
      throw ValidationError("--freqs: frequencies must be strictly increasing");
    }
  }
  return out;
}

std::pair<double, double> parse_medium(const std::string& spec) {
  const auto parts = split(spec, ',');
  if (parts.size() != 2) throw ValidationError("--medium expects lambda,mu");
  const double lambda = to_double(parts[0], "--medium"), mu = to_double(parts[1], "--medium");
  try {
    Medium(lambda, mu, 1.0);
  } catch (const DomainError& e) {
    throw ValidationError(std::string("--medium: ") + e.what());
  }
  return {lambda, mu};
}

std::vector<Vec3> resolve_directions(const std::string& spec) {
  if (spec == "preset:cube-faces") return cube_face_directions();
  if (spec == "preset:y") return {Vec3(0.0, 1.0, 0.0)};
  if (spec.rfind("preset:", 0) == 0) throw ValidationError("unknown direction preset " + spec);
  if (!fs::exists(spec)) {
    const auto parts = split(spec, ',');
    if (parts.size() == 3) {
      const Vec3 d(to_double(parts[0], "--directions"), to_double(parts[1], "--directions"),
                   to_double(parts[2], "--directions"));
      if (!(d.norm() > 0.0)) throw ValidationError("--directions: zero vector");
      return {d.normalized()};
    }
    throw ValidationError("--directions: no such file " + spec);
  }
  return directions_from_json(read_text_file(spec));
}

SurfaceParam resolve_surface(const std::string& spec, int order) {
  if (fs::exists(spec)) return surface_from_json(read_text_file(spec));
  const bool bean = spec.rfind("bean", 0) == 0;
  return preset_param(spec, order >= 0 ? order : (bean ? 8 : 1));
}

std::uint64_t derived_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

void apply_forward_order(const std::string& spec, InversionConfig& cfg) {
  if (spec == "default") {
    cfg.forward_order = nullptr;
    cfg.solver.order = -1;
  } else if (spec.empty() || spec == "inversion") {
    cfg.forward_order = inversion_forward_order;
    cfg.solver.order = -1;
  } else {
    cfg.forward_order = nullptr;
    cfg.solver.order = forward_order_for(spec, Medium(), 1.0);
  }
}

// ---------------------------------------------------------------------------

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto [lambda, mu] = std::pair{cfg.lambda, cfg.mu};
  const auto omegas = parse_frequencies(cfg.freqs);
  const auto dirs = resolve_directions(cfg.directions);
  const SurfaceParam sp = resolve_surface(cfg.surface, cfg.surface_order);
  if (cfg.points < 1) throw ValidationError("--points must be positive");
  if (cfg.noise < 0.0) throw ValidationError("--noise must be non-negative");
  if (!(cfg.radius > 0.0)) throw ValidationError("--radius must be positive");
  const fs::path dir = prepare_out_dir(cfg.out);
  const auto pts = fibonacci_sphere(cfg.points, cfg.radius);

  write_text_file((dir / "truth.json").string(), surface_to_json(sp));
  std::size_t index = 0;
  for (double omega : omegas) {
    const Medium med(lambda, mu, omega);
    SolverOptions opt = solver_options(cfg, SolverOptions{}.tolerance);
    opt.order = forward_order_for(cfg.forward_order, med, cfg.radius);
    for (std::size_t d = 0; d < dirs.size(); ++d, ++index) {
      MeasurementSet ms;
      try {
        ms = scattering_operator(sp, IncidentWave::compressional(dirs[d]), med, cfg.radius, pts, opt);
      } catch (const SolverError& e) {
        err << "synth: forward solve failed at omega = " << omega << ", direction " << d
            << ": residual " << e.residual() << " (" << e.what() << ")\n";
        return 2;
      }
      ms = add_noise(ms, cfg.noise, derived_seed(cfg.seed, index));
      const fs::path file = dir / ("meas_w" + omega_tag(omega) + "_d" + std::to_string(d) + ".json");
      write_text_file(file.string(), measurement_to_json(ms));
      out << file.string() << '\n';
    }
  }
  return 0;
}

int cmd_invert(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.data.empty()) throw ValidationError("invert: no data files given");
  for (const auto& f : cfg.data) {
    if (!fs::is_regular_file(f)) throw ValidationError("invert: no such data file " + f);
  }
  std::vector<MeasurementSet> data;
  for (const auto& f : cfg.data) data.push_back(measurement_from_json(read_text_file(f)));
  for (const auto& ms : data) {
    if (ms.R != data[0].R || ms.medium.lambda != data[0].medium.lambda ||
        ms.medium.mu != data[0].medium.mu) {
      throw ValidationError("invert: data files disagree on R or the medium");
    }
  }
  InversionConfig ic;
  if (!cfg.config.empty()) {
    ic = inversion_config_from_json(read_text_file(cfg.config));
  } else {
    ic.iterations = cfg.iterations;
    ic.tau0 = cfg.tau0;
    ic.R0 = cfg.R0;
    ic.order_offset = cfg.order_offset;
    ic.backtracking = cfg.backtracking;
    ic.sweep_directions = cfg.sweep;
    apply_forward_order(cfg.forward_order, ic);
    ic.solver.tolerance = cfg.tolerance >= 0.0 ? cfg.tolerance : 0.05;
  }
  if (cfg.use_freqs) ic.omegas = parse_frequencies(cfg.freqs);
  const auto schedule = build_schedule(ic, data);
  for (const auto& st : schedule) {
    const bool present = std::any_of(data.begin(), data.end(), [&](const MeasurementSet& ms) {
      return std::abs(ms.medium.omega - st.omega) <= 1e-12 * st.omega;
    });
    if (!present) throw ValidationError("invert: no data at omega = " + omega_tag(st.omega));
  }
  std::optional<SurfaceParam> truth;
  if (!cfg.truth.empty()) truth = resolve_surface(cfg.truth, -1);
  const fs::path dir = prepare_out_dir(cfg.out);

  const InversionState st = continuation_run(data, ic);
  for (std::size_t i = 0; i < st.stages.size(); ++i) {
    const auto& s = st.stages[i];
    write_text_file((dir / ("stage_" + std::to_string(i) + ".json")).string(), surface_to_json(s.C));
    write_cross_sections(dir / ("cross_sections_stage_" + std::to_string(i) + ".csv"), s.C);
    out << "stage " << i << " omega " << s.omega << " order " << s.order << " f " << s.f_start
        << " -> " << s.f_end;
    if (truth) out << " error " << surface_error(s.C, *truth);
    out << '\n';
  }
  write_text_file((dir / "final.json").string(), surface_to_json(st.C));
  write_cross_sections(dir / "cross_sections.csv", st.C);
  std::ostringstream hist;
  write_history_csv(hist, st.history);
  write_text_file((dir / "history.csv").string(), hist.str());
  if (truth) out << "final error " << surface_error(st.C, *truth) << '\n';
  if (st.aborted) {
    err << "invert: aborted: " << st.abort_reason << '\n';
    return 3;
  }
  return 0;
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto omegas = parse_frequencies(cfg.freqs);
  const double R = cfg.radius;
  json props = json::array();
  bool all = true;
  auto record = [&](json p) {
    all = all && p["pass"].get<bool>();
    props.push_back(std::move(p));
  };

  {
    double worst_z0 = 0.0;
    int violations = 0;
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0}) {
      const auto z = z_log_derivative_all(60, t);
      worst_z0 = std::max(worst_z0, std::abs(z[0] - cdouble(-1.0, t)));
      for (int n = 0; n <= 60; ++n) {
        if (z[n].real() < -(n + 1.0) || z[n].real() > -1.0 || !(z[n].imag() > 0.0) ||
            z[n].imag() > t) {
          ++violations;
        }
      }
    }
    record({{"name", "zn_bounds"}, {"violations", violations}, {"z0_error", worst_z0},
            {"tolerance", 1e-13}, {"pass", violations == 0 && worst_z0 <= 1e-13}});
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> g;
  for (double omega : omegas) {
    const Medium med(cfg.lambda, cfg.mu, omega);
    const int N0 = definiteness_onset(med, R, 200);
    record({{"name", "dtn_definiteness"}, {"omega", omega}, {"N0", N0}, {"nmax", 200},
            {"pass", N0 >= 0}});

    double worst = 0.0, max_im = -INFINITY;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = std::uniform_int_distribution<int>(0, 30)(rng);
      PotentialCoeffs p(n);
      p.at(n, 0) = CVec3(cdouble(g(rng), g(rng)), cdouble(g(rng), g(rng)), cdouble(g(rng), g(rng)));
      if (n == 0) p.at(0, 0)(1) = p.at(0, 0)(2) = 0.0;
      const auto back = displacement_to_potentials(potentials_to_displacement(p, med, R), med);
      worst = std::max(worst, (back.at(n, 0) - p.at(n, 0)).norm() / p.at(n, 0).norm());
      max_im = std::max(max_im, lambda_n(med, R, n).imag());
    }
    record({{"name", "potential_round_trip"}, {"omega", omega}, {"max_error", worst},
            {"tolerance", 1e-12}, {"max_im_lambda", max_im},
            {"pass", worst < 1e-12 && max_im < 0.0}});

    const auto pot = [&] {
      PotentialCoeffs p(10);
      for (int n = 0; n <= 10; ++n) {
        for (int m = -n; m <= n; ++m) {
          for (int c = 0; c < (n == 0 ? 1 : 3); ++c) p.at(n, m)(c) = cdouble(g(rng), g(rng));
        }
      }
      return p;
    }();
    const auto series = boundary_operator_series(pot, med, R);
    const auto tbc = apply_T(potentials_to_displacement(pot, med, R), med);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      num += (series.blocks[i] - tbc.blocks[i]).squaredNorm();
      den += series.blocks[i].squaredNorm();
    }
    record({{"name", "tbc_series"}, {"omega", omega}, {"max_error", std::sqrt(num / den)},
            {"tolerance", 1e-8}, {"pass", std::sqrt(num / den) < 1e-8}});
  }

  if (!cfg.quick) {
    const Medium med(cfg.lambda, cfg.mu, omegas.front());
    const auto pts = fibonacci_sphere(30, R);
    const SolverOptions opt{.order = 8};
    std::vector<MeasurementSet> data{scattering_operator(
        ellipsoid_param(0.6 * R, 0.75 * R, 0.9 * R, 1),
        IncidentWave::compressional(Vec3(0.0, 1.0, 0.0)), med, R, pts, opt)};
    const SurfaceParam C = initial_guess(0.5 * R, 1);
    const ObjectiveResult r = objective_and_gradient(C, data, opt);
    Eigen::VectorXd fd(r.gradient.size());
    const double h = 1e-6 * R;
    for (Eigen::Index i = 0; i < fd.size(); ++i) {
      SurfaceParam p = C, m = C;
      p.C[i] += h;
      m.C[i] -= h;
      fd(i) = (objective_and_gradient(p, data, opt, false).f -
               objective_and_gradient(m, data, opt, false).f) / (2 * h);
    }
    const double e = (fd - r.gradient).norm() / r.gradient.norm();
    record({{"name", "gradient_fd"}, {"omega", omegas.front()}, {"rel_error", e},
            {"tolerance", 1e-4}, {"pass", e < 1e-4}});
  }

  json report = {{"schema", kSchemaVersion},
                 {"medium", {{"lambda", cfg.lambda}, {"mu", cfg.mu}, {"R", R}}},
                 {"properties", props},
                 {"pass", all}};
  out << report.dump(1) << '\n';
  return all ? 0 : 3;
}

int cmd_jacobian_dump(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const double omega = parse_frequencies(cfg.freqs).front();
  const Vec3 d = resolve_directions(cfg.directions).front();
  const SurfaceParam sp = resolve_surface(cfg.surface, cfg.surface_order);
  if (cfg.points < 1) throw ValidationError("--points must be positive");
  const fs::path dir = prepare_out_dir(cfg.out);
  const Medium med(cfg.lambda, cfg.mu, omega);
  SolverOptions opt = solver_options(cfg, SolverOptions{}.tolerance);
  opt.order = forward_order_for(cfg.forward_order, med, cfg.radius);
  const auto w = IncidentWave::compressional(d);
  const ExteriorDirichletSolver solver(Surface(sp), med, cfg.radius, opt);
  Eigen::VectorXd res, rel;
  const Eigen::VectorXcd x = solver.solve_packed(incident_dirichlet_data(solver, w), &res, &rel);
  if (rel(0) > opt.tolerance) {
    err << "jacobian-dump: forward solve residual " << rel(0) << " exceeds " << opt.tolerance << '\n';
    return 2;
  }
  const auto pts = fibonacci_sphere(cfg.points, cfg.radius);
  const ShapeJacobian J = shape_jacobian(solver, sp, x, w, pts);
  std::ostringstream os;
  os << "point,component,coefficient,re,im\n" << std::setprecision(17);
  for (Eigen::Index c = 0; c < J.J.cols(); ++c) {
    for (Eigen::Index r = 0; r < J.J.rows(); ++r) {
      os << r / 3 << ',' << r % 3 << ',' << c + 1 << ',' << J.J(r, c).real() << ','
         << J.J(r, c).imag() << '\n';
    }
  }
  const fs::path file = dir / "jacobian.csv";
  write_text_file(file.string(), os.str());
  out << file.string() << " columns " << J.J.cols() << " max residual "
      << (J.residual.size() ? J.residual.maxCoeff() : 0.0) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string medium = "2,1";
  CLI::App app{"Elastic obstacle scattering: synthesis, inversion and checks", "elastinv"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--medium", medium, "Lame parameters lambda,mu")->capture_default_str();
    sub->add_option("--radius", cfg.radius, "Measurement sphere radius R")->capture_default_str();
    sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Seed for every random draw")->capture_default_str();
  };
  auto surface = [&](CLI::App* sub) {
    sub->add_option("--surface", cfg.surface,
                    "Surface JSON file or preset sphere:R0 | ellipsoid:a,b,c | bean")
        ->capture_default_str();
    sub->add_option("--surface-order", cfg.surface_order, "Harmonic order for presets");
    sub->add_option("--points", cfg.points, "Measurement points on the sphere")->capture_default_str();
    sub->add_option("--directions", cfg.directions,
                    "Direction file, preset:cube-faces, preset:y or x,y,z")
        ->capture_default_str();
    sub->add_option("--forward-order", cfg.forward_order, "default | inversion | integer");
    sub->add_option("--tolerance", cfg.tolerance, "Relative boundary residual tolerance");
  };

  auto* synth = app.add_subcommand("synth", "Synthesize measurement files");
  common(synth);
  surface(synth);
  synth->add_option("--freqs", cfg.freqs, "Frequencies a:b:step or a list")->capture_default_str();
  synth->add_option("--noise", cfg.noise, "Relative noise level delta")->capture_default_str();

  auto* invert = app.add_subcommand("invert", "Reconstruct a surface from measurement files");
  common(invert);
  invert->add_option("data", cfg.data, "Measurement JSON files")->required();
  auto* freq_opt = invert->add_option("--freqs", cfg.freqs, "Stage frequencies (default: all in data)");
  invert->add_option("--config", cfg.config, "Inversion config JSON (replaces the flags below)");
  invert->add_option("--iterations", cfg.iterations, "Iterations per stage")->capture_default_str();
  invert->add_option("--tau0", cfg.tau0, "Step size numerator")->capture_default_str();
  invert->add_option("--R0", cfg.R0, "Initial sphere radius")->capture_default_str();
  invert->add_option("--order-offset", cfg.order_offset, "Surface order = floor(omega) + offset")
      ->capture_default_str();
  invert->add_flag("--backtracking", cfg.backtracking, "Halve steps until f decreases");
  invert->add_flag("--sweep", cfg.sweep, "Iterate per incident direction");
  invert->add_option("--forward-order", cfg.forward_order, "default | inversion | integer");
  invert->add_option("--tolerance", cfg.tolerance, "Relative boundary residual tolerance");
  invert->add_option("--truth", cfg.truth, "Reference surface for error reports");

  auto* check = app.add_subcommand("check", "Run the verification properties");
  common(check);
  check->add_option("--freqs", cfg.freqs, "Frequencies to scan")->capture_default_str();
  check->add_flag("--quick", cfg.quick, "Skip the gradient check");

  auto* jac = app.add_subcommand("jacobian-dump", "Write the shape Jacobian as CSV");
  common(jac);
  surface(jac);
  jac->add_option("--freqs", cfg.freqs, "Frequency (first entry is used)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }
  cfg.use_freqs = freq_opt->count() > 0;

  try {
    std::tie(cfg.lambda, cfg.mu) = parse_medium(medium);
    if (*synth) return cmd_synth(cfg, out, err);
    if (*invert) return cmd_invert(cfg, out, err);
    if (*check) return cmd_check(cfg, out, err);
    return cmd_jacobian_dump(cfg, out, err);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << " (residual " << e.residual() << ")\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace elastinv::cli
