#include "lvl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "lvl/gram.hpp"
#include "lvl/report.hpp"

#ifndef LVL_VERSION
#define LVL_VERSION "0.0.0"
#endif
#ifndef LVL_DATA_DIR
#define LVL_DATA_DIR "data"
#endif

namespace lvl {

using nlohmann::json;

namespace {

struct SpecFlags {
  std::string path;
  std::vector<double> lengths;
  std::string mode;
  std::vector<double> projection;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::optional<double> tol;
  std::optional<double> grad_tol;
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Spec file (if any) overlaid with command-line flags.
ArmSpecDocument load_spec(const SpecFlags& f) {
  json doc = json::object();
  if (!f.path.empty()) {
    doc = parse_json_text(read_text(f.path), f.path);
  } else if (f.lengths.empty()) {
    throw InputError("spec: give a spec file or --lengths");
  }
  if (!doc.is_object()) throw InputError("<root>: expected a JSON object");
  if (!f.lengths.empty()) {
    doc["lengths"] = f.lengths;
    // directions from the file no longer fit different lengths
    if (doc.contains("directions") && doc["directions"].size() != f.lengths.size()) doc.erase("directions");
  }
  if (!f.mode.empty()) doc["mode"] = f.mode;
  if (!f.projection.empty()) {
    if (f.projection.size() != 3) throw InputError("--projection: expected 3 comma-separated numbers");
    doc["projection"] = f.projection;
  }
  json& s = doc["search"];
  if (!s.is_object()) s = json::object();
  if (f.seed) s["seed"] = *f.seed;
  if (f.restarts) s["restarts"] = *f.restarts;
  if (f.tol) s["classify_tol"] = *f.tol;
  if (f.grad_tol) s["grad_tol"] = *f.grad_tol;
  return parse_arm_spec(doc);
}

void add_spec_options(CLI::App* cmd, SpecFlags& f, bool search_flags) {
  cmd->add_option("spec", f.path, "Arm spec JSON file ('-' for stdin)");
  cmd->add_option("--lengths", f.lengths, "Edge lengths, overriding the spec")->delimiter(',');
  cmd->add_option("--mode", f.mode, "full, reduced or plane_b")
      ->check(CLI::IsMember({"full", "reduced", "plane_b"}));
  cmd->add_option("--tol", f.tol, "Classification tolerance");
  if (search_flags) {
    cmd->add_option("--seed", f.seed, "Random seed (default 0)");
    cmd->add_option("--restarts", f.restarts, "Number of restarts")->check(CLI::PositiveNumber);
    cmd->add_option("--grad-tol", f.grad_tol, "Gradient norm accepted as critical");
  }
}

class Sink {
 public:
  Sink(std::ostream& fallback, const std::string& path) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError(path + ": cannot open for writing");
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void emit(const json& j, std::ostream& out, const std::string& path) {
  Sink sink(out, path);
  *sink << j.dump(2) << '\n';
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json config_json(const ArmConfiguration& cfg) {
  json d = json::array();
  for (const auto& u : cfg.directions()) d.push_back(vec_json(u));
  return {{"lengths", std::vector<double>(cfg.lengths().values().begin(), cfg.lengths().values().end())},
          {"mode", std::string(to_string(cfg.mode()))},
          {"directions", d}};
}

// ---- eval ------------------------------------------------------------------

int cmd_eval(const SpecFlags& f, const std::string& output, std::ostream& out) {
  const ArmSpecDocument spec = load_spec(f);
  const ArmConfiguration cfg = spec.configuration();
  json j{{"schema_version", kSchemaVersion}};
  if (cfg.size() >= 3) j["value"] = signed_volume(cfg);
  else j["value"] = nullptr;
  if (spec.projection) {
    j["projection"] = vec_json(*spec.projection);
    j["projected_area"] = projected_area(*spec.projection, cfg);
  }
  j["grad_norm"] = cfg.size() >= 3 ? json(gradient_norm(cfg)) : json(nullptr);
  emit(j, out, output);
  return kExitOk;
}

// ---- gradcheck -------------------------------------------------------------

// Central differences along each tangent direction, moving u_j on its great
// circle so that the perturbed point stays exactly on the sphere.
double gradcheck_one(const ArmConfiguration& cfg, double h) {
  const auto frame = tangent_frame(cfg);
  const Eigen::VectorXd g = frame_gradient(cfg, frame);
  Eigen::VectorXd fd(g.size());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    auto moved = [&](double s) {
      std::vector<Vec3> d(cfg.directions().begin(), cfg.directions().end());
      const Vec3& u = d[frame[k].joint];
      d[frame[k].joint] = std::cos(s) * u + std::sin(s) * frame[k].dir;
      return signed_volume(cfg.with_directions(std::move(d)));
    };
    fd(static_cast<Eigen::Index>(k)) = (moved(h) - moved(-h)) / (2.0 * h);
  }
  const double scale = std::max(g.norm(), 1e-3 * std::pow(cfg.lengths().total(), 3));
  return (fd - g).norm() / scale;
}

int cmd_gradcheck(const SpecFlags& f, int samples, double h, const std::string& output, std::ostream& out) {
  const ArmSpecDocument spec = load_spec(f);
  if (spec.lengths.size() < 3) throw InputError("lengths: gradcheck needs at least 3 edges");
  double worst = 0.0;
  int checked = 0;
  if (spec.directions) {
    worst = gradcheck_one(spec.configuration(), h);
    checked = 1;
  } else {
    for (int i = 0; i < samples; ++i) {
      const auto cfg = random_start(spec.arm_lengths(), spec.mode, spec.search.seed, static_cast<std::uint64_t>(i));
      worst = std::max(worst, gradcheck_one(cfg, h));
      ++checked;
    }
  }
  const bool ok = worst <= 1e-6;
  emit({{"schema_version", kSchemaVersion},
        {"samples", checked},
        {"step", h},
        {"max_relative_error", worst},
        {"ok", ok}},
       out, output);
  return ok ? kExitOk : kExitIdentityFailure;
}

// ---- critical ----------------------------------------------------------------

int cmd_critical(const SpecFlags& f, int threads, const std::string& format, const std::string& output,
                 std::ostream& out) {
  ArmSpecDocument spec = load_spec(f);
  spec.search.threads = threads;
  const SearchResult result = find_critical_points(spec.arm_lengths(), spec.search);
  ReportDocument report{LVL_VERSION, to_json(spec), result.records, result.summary};
  Sink sink(out, output);
  if (format == "csv") {
    write_csv(report, *sink);
  } else {
    *sink << to_json(report).dump(2) << '\n';
  }
  return report.records.empty() ? kExitEmpty : kExitOk;
}

// ---- classify ----------------------------------------------------------------

int cmd_classify(const SpecFlags& f, const std::string& output, std::ostream& out, std::ostream& err) {
  const ArmSpecDocument spec = load_spec(f);
  const ArmConfiguration cfg = spec.configuration();
  if (cfg.size() < 3) throw InputError("lengths: classify needs at least 3 edges");
  CriticalPointRecord rec{cfg, signed_volume(cfg), gradient_norm(cfg), morse_data(cfg), std::nullopt, 1};
  if (rec.grad_norm > spec.search.grad_tol) {
    err << "warning: configuration is not critical (|grad| = " << rec.grad_norm << ")\n";
  }
  if (cfg.mode() == ParamMode::PlaneB) throw InputError("mode: classify is not defined for plane_b");
  rec.classification = classify_critical(cfg, spec.search.classify_tol);
  json j = to_json(rec);
  j["schema_version"] = kSchemaVersion;
  emit(j, out, output);
  return kExitOk;
}

// ---- gram --------------------------------------------------------------------

GramPoint gram_point(const std::vector<double>& abc, const std::vector<double>& xyz) {
  if (abc.size() != 3) throw InputError("lengths: expected a b c");
  for (double v : abc) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("lengths: a, b, c must be finite and > 0");
  }
  GramPoint p;
  p.a = abc[0];
  p.b = abc[1];
  p.c = abc[2];
  if (!xyz.empty()) {
    if (xyz.size() != 3) throw InputError("point: expected x y z");
    p.x = xyz[0];
    p.y = xyz[1];
    p.z = xyz[2];
  }
  return p;
}

json gram_point_json(const GramPoint& p) { return json::array({p.x, p.y, p.z}); }

int cmd_gram_det(const std::vector<double>& abc, const std::vector<double>& xyz, bool reconstruct, bool mirror,
                 const std::string& output, std::ostream& out, std::ostream& err) {
  if (xyz.size() != 3) throw InputError("point: expected x y z");
  const GramPoint p = gram_point(abc, xyz);
  const bool inside = p.in_box();
  if (!inside) err << "warning: point lies outside the box |x|<=bc, |y|<=ac, |z|<=ab\n";
  const Vec3 g = gram_gradient(p);
  json j{{"schema_version", kSchemaVersion},
         {"point", gram_point_json(p)},
         {"lengths", json::array({p.a, p.b, p.c})},
         {"in_box", inside},
         {"det", gram_det(p)},
         {"gradient", vec_json(g)}};
  if (reconstruct) {
    const ArmConfiguration cfg = reconstruct_from_gram(p, mirror);
    j["configuration"] = config_json(cfg);
    j["value"] = signed_volume(cfg);
  }
  emit(j, out, output);
  return kExitOk;
}

int cmd_gram_critical(const std::vector<double>& abc, const std::string& output, std::ostream& out) {
  const GramPoint base = gram_point(abc, {});
  json pts = json::array();
  for (const auto& cp : gram_critical_points(base.a, base.b, base.c)) {
    pts.push_back({{"point", gram_point_json(cp.point)},
                   {"value", cp.value},
                   {"gradient", vec_json(gram_gradient(cp.point))},
                   {"eigenvalues", cp.eigenvalues},
                   {"morse_index", cp.morse_index}});
  }
  emit({{"schema_version", kSchemaVersion}, {"lengths", abc}, {"critical_points", pts}}, out, output);
  return kExitOk;
}

int cmd_gram_surface(const std::vector<double>& abc, double level, int res, int threads,
                     const std::string& output, std::ostream& out, std::ostream& err) {
  const GramPoint base = gram_point(abc, {});
  if (res < 8) throw InputError("--res: must be >= 8");
  const TriangleMesh mesh = extract_isosurface(base.a, base.b, base.c, level, res, threads);
  const double bound = isosurface_error_bound(base.a, base.b, base.c, res);
  double worst = 0.0;
  bool boxed = true;
  for (const auto& v : mesh.vertices) {
    GramPoint q = base;
    q.x = v.x;
    q.y = v.y;
    q.z = v.z;
    worst = std::max(worst, std::abs(gram_det(q) - level));
    boxed = boxed && q.in_box();
  }
  {
    Sink sink(out, output);
    write_obj(mesh, *sink);
  }
  err << "vertices " << mesh.vertices.size() << ", triangles " << mesh.triangles.size()
      << ", max |det G - level| " << worst << " (bound " << bound << ")\n";
  if (mesh.empty()) return kExitEmpty;
  return worst <= bound && boxed ? kExitOk : kExitIdentityFailure;
}

int cmd_gram_roundtrip(std::vector<double> abc, int samples, std::uint64_t seed, const std::string& output,
                       std::ostream& out) {
  if (abc.empty()) abc = {1.0, 1.0, 1.0};
  const GramPoint base = gram_point(abc, {});
  const ArmLengths lengths({base.a, base.b, base.c});
  double det_err = 0.0;
  double gram_err = 0.0;
  for (int i = 0; i < samples; ++i) {
    const ArmConfiguration cfg = random_start(lengths, ParamMode::Reduced, seed, static_cast<std::uint64_t>(i));
    const double v = signed_volume(cfg);
    const GramPoint p = gram_from_config(cfg);
    det_err = std::max(det_err, std::abs(gram_det(p) - v * v) / (1.0 + v * v));
    const GramPoint back = gram_from_config(reconstruct_from_gram(p));
    const double scale = base.a * base.b + base.a * base.c + base.b * base.c;
    gram_err = std::max({gram_err, std::abs(back.x - p.x) / scale, std::abs(back.y - p.y) / scale,
                         std::abs(back.z - p.z) / scale});
  }
  const bool ok = det_err <= 1e-10 && gram_err <= 1e-10;
  emit({{"schema_version", kSchemaVersion},
        {"lengths", abc},
        {"samples", samples},
        {"seed", seed},
        {"max_det_error", det_err},
        {"max_gram_error", gram_err},
        {"ok", ok}},
       out, output);
  return ok ? kExitOk : kExitIdentityFailure;
}

// ---- bottmorse ---------------------------------------------------------------

std::string resolve_inventory(const std::string& name) {
  if (name == "s2xs2" || name == "s1xs2") return std::string(LVL_DATA_DIR) + "/" + name + ".json";
  return name;
}

int cmd_bottmorse(const std::string& name, const std::string& output, std::ostream& out) {
  const std::string path = resolve_inventory(name);
  const BottMorseInventory inv = parse_inventory(parse_json_text(read_text(path), path));
  const BottMorseResult r = bott_morse_check(inv.criticals, inv.manifold);
  auto coeffs = [](const IntPolynomial& p) {
    return std::vector<std::int64_t>(p.coeffs().begin(), p.coeffs().end());
  };
  json j{{"schema_version", kSchemaVersion},
         {"difference", coeffs(r.difference)},
         {"difference_text", r.difference.to_string()},
         {"divisible", r.divisible},
         {"remainder", r.remainder},
         {"ok", r.ok}};
  if (r.divisible) {
    j["R"] = coeffs(r.quotient);
    j["R_text"] = r.quotient.to_string();
  }
  emit(j, out, output);
  return r.ok ? kExitOk : kExitIdentityFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical points of the signed volume of polygonal arms"};
  app.set_version_flag("--version", std::string(LVL_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string output;
  app.add_option("--output,-o", output, "Write the result here instead of stdout");

  SpecFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Signed volume (and projected area) of an explicit configuration");
  add_spec_options(eval, eval_flags, false);
  eval->add_option("--projection", eval_flags.projection, "Projection vector p as x,y,z")->delimiter(',');

  SpecFlags gc_flags;
  int gc_samples = 100;
  double gc_step = 1e-5;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare the analytic gradient with central differences");
  add_spec_options(gradcheck, gc_flags, false);
  gradcheck->add_option("--seed", gc_flags.seed, "Random seed (default 0)");
  gradcheck->add_option("--samples", gc_samples, "Random configurations when no directions are given")
      ->check(CLI::PositiveNumber);
  gradcheck->add_option("--step", gc_step, "Finite-difference step")->check(CLI::PositiveNumber);

  SpecFlags crit_flags;
  int threads = 0;
  std::string format = "json";
  auto* critical = app.add_subcommand("critical", "Multi-start search for critical configurations");
  add_spec_options(critical, crit_flags, true);
  critical->add_option("--threads", threads, "Worker threads (default: LVL_THREADS or all cores)");
  critical->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  SpecFlags cls_flags;
  auto* classify = app.add_subcommand("classify", "Classify an explicit critical configuration");
  add_spec_options(classify, cls_flags, false);
  classify->add_option("--grad-tol", cls_flags.grad_tol, "Gradient norm accepted as critical");

  auto* gram = app.add_subcommand("gram", "Gram-matrix picture of 3-arms");
  gram->require_subcommand(1);
  gram->fallthrough();
  std::vector<double> abc;
  std::vector<double> xyz;
  bool reconstruct = false;
  bool mirror = false;
  auto* gdet = gram->add_subcommand("det", "det G and its gradient at (x, y, z)");
  gdet->add_option("values", xyz, "a b c x y z: lengths then the point")->expected(6)->required();
  gdet->add_flag("--reconstruct", reconstruct, "Also reconstruct an arm with this Gram matrix");
  gdet->add_flag("--mirror", mirror, "Reconstruct the negatively oriented branch");
  auto* gcrit = gram->add_subcommand("critical", "The critical points of det G with Morse indices");
  gcrit->add_option("lengths", abc, "Edge lengths a b c")->expected(3)->required();
  double level = 0.0;
  int res = 64;
  int gthreads = 0;
  auto* gsurf = gram->add_subcommand("surface", "OBJ mesh of {det G = level} inside the box");
  gsurf->add_option("lengths", abc, "Edge lengths a b c")->expected(3)->required();
  gsurf->add_option("--level", level, "Level value (default 0)");
  gsurf->add_option("--res", res, "Grid resolution per axis (>= 8)");
  gsurf->add_option("--threads", gthreads, "Worker threads");
  int samples = 1000;
  std::uint64_t gseed = 0;
  auto* ground = gram->add_subcommand("roundtrip", "Check det G = V^2 and Gram reconstruction on random arms");
  ground->add_option("lengths", abc, "Edge lengths a b c (default 1 1 1)")->expected(3);
  ground->add_option("--samples", samples, "Number of random arms")->check(CLI::PositiveNumber);
  ground->add_option("--seed", gseed, "Random seed (default 0)");

  std::string inventory;
  auto* bottmorse = app.add_subcommand("bottmorse", "Bott-Morse polynomial check for an inventory");
  bottmorse->add_option("inventory", inventory, "Inventory JSON file, or s2xs2 / s1xs2")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*eval) return cmd_eval(eval_flags, output, out);
    if (*gradcheck) return cmd_gradcheck(gc_flags, gc_samples, gc_step, output, out);
    if (*critical) return cmd_critical(crit_flags, threads, format, output, out);
    if (*classify) return cmd_classify(cls_flags, output, out, err);
    if (*gdet) {
      return cmd_gram_det({xyz[0], xyz[1], xyz[2]}, {xyz[3], xyz[4], xyz[5]}, reconstruct, mirror, output, out,
                          err);
    }
    if (*gcrit) return cmd_gram_critical(abc, output, out);
    if (*gsurf) return cmd_gram_surface(abc, level, res, gthreads, output, out, err);
    if (*ground) return cmd_gram_roundtrip(abc, samples, gseed, output, out);
    if (*bottmorse) return cmd_bottmorse(inventory, output, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace lvl
