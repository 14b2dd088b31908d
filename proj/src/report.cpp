#include "lvl/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace lvl {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw InputError(field + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + key, "missing required field");
  return j.at(key);
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

// Non-finite doubles are written as null and read back as +inf.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

long long as_integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<long long>();
}

Vec3 as_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) fail(field, "expected an array of 3 numbers");
  return {as_number(j[0], field + "[0]"), as_number(j[1], field + "[1]"), as_number(j[2], field + "[2]")};
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json verdict_json(const Verdict& v) { return {{"ok", v.ok}, {"residual", num(v.residual)}}; }
Verdict parse_verdict(const json& j) { return {j.at("ok").get<bool>(), num_or_inf(j.at("residual"))}; }

void check_schema_version(const json& doc) {
  if (doc.contains("schema_version")) {
    const long long v = as_integer(doc.at("schema_version"), "schema_version");
    if (v != kSchemaVersion) fail("schema_version", "unsupported version " + std::to_string(v));
  }
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
}

ArmConfiguration ArmSpecDocument::configuration() const {
  if (!directions) throw InputError("directions: required for this command");
  try {
    return ArmConfiguration(arm_lengths(), *directions, mode);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

ArmSpecDocument parse_arm_spec(const json& doc) {
  if (!doc.is_object()) fail("<root>", "expected a JSON object");
  check_schema_version(doc);
  ArmSpecDocument spec;

  const json& lens = require(doc, "lengths", "");
  if (!lens.is_array() || lens.size() < 2) fail("lengths", "expected an array of at least 2 numbers");
  for (std::size_t i = 0; i < lens.size(); ++i) {
    const std::string f = "lengths[" + std::to_string(i) + "]";
    const double l = as_number(lens[i], f);
    if (!(l > 0.0) || !std::isfinite(l)) fail(f, "must be > 0");
    spec.lengths.push_back(l);
  }

  if (doc.contains("mode")) {
    if (!doc.at("mode").is_string()) fail("mode", "expected a string");
    try {
      spec.mode = parse_mode(doc.at("mode").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  spec.search.mode = spec.mode;

  if (doc.contains("directions") && !doc.at("directions").is_null()) {
    const json& dj = doc.at("directions");
    if (!dj.is_array()) fail("directions", "expected an array of 3-vectors");
    std::vector<Vec3> dirs;
    for (std::size_t i = 0; i < dj.size(); ++i) dirs.push_back(as_vec3(dj[i], "directions[" + std::to_string(i) + "]"));
    spec.directions = std::move(dirs);
    spec.configuration();  // validates count, unit length and mode constraints
  }

  if (doc.contains("projection") && !doc.at("projection").is_null()) {
    spec.projection = as_vec3(doc.at("projection"), "projection");
    if (norm(*spec.projection) == 0.0) fail("projection", "must be nonzero");
  }

  if (doc.contains("search")) {
    const json& s = doc.at("search");
    if (!s.is_object()) fail("search", "expected an object");
    if (s.contains("restarts")) {
      const long long r = as_integer(s.at("restarts"), "search.restarts");
      if (r < 1) fail("search.restarts", "must be >= 1");
      spec.search.restarts = static_cast<int>(r);
    }
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_unsigned() && !(s.at("seed").is_number_integer() && s.at("seed").get<long long>() >= 0)) {
        fail("search.seed", "expected a non-negative integer");
      }
      spec.search.seed = s.at("seed").get<std::uint64_t>();
    }
    if (s.contains("grad_tol")) {
      spec.search.grad_tol = as_number(s.at("grad_tol"), "search.grad_tol");
      if (!(spec.search.grad_tol > 0.0)) fail("search.grad_tol", "must be > 0");
    }
    if (s.contains("step_tol")) spec.search.step_tol = as_number(s.at("step_tol"), "search.step_tol");
    if (s.contains("max_iters")) {
      const long long m = as_integer(s.at("max_iters"), "search.max_iters");
      if (m < 1) fail("search.max_iters", "must be >= 1");
      spec.search.max_iters = static_cast<int>(m);
    }
    if (s.contains("classify_tol")) {
      spec.search.classify_tol = as_number(s.at("classify_tol"), "search.classify_tol");
      if (!(spec.search.classify_tol > 0.0)) fail("search.classify_tol", "must be > 0");
    }
  }
  return spec;
}

json to_json(const ArmSpecDocument& spec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lengths"] = spec.lengths;
  j["mode"] = std::string(to_string(spec.mode));
  if (spec.directions) {
    json d = json::array();
    for (const auto& u : *spec.directions) d.push_back(vec3_json(u));
    j["directions"] = d;
  }
  if (spec.projection) j["projection"] = vec3_json(*spec.projection);
  j["search"] = {{"restarts", spec.search.restarts},     {"seed", spec.search.seed},
                 {"grad_tol", spec.search.grad_tol},     {"step_tol", spec.search.step_tol},
                 {"max_iters", spec.search.max_iters},   {"classify_tol", spec.search.classify_tol}};
  return j;
}

json to_json(const CriticalPointRecord& rec) {
  const auto& cfg = rec.configuration;
  json dirs = json::array();
  for (const auto& u : cfg.directions()) dirs.push_back(vec3_json(u));
  json lengths = json::array();
  for (double l : cfg.lengths().values()) lengths.push_back(l);

  json j;
  j["value"] = rec.value;
  j["grad_norm"] = rec.grad_norm;
  j["multiplicity"] = rec.multiplicity;
  j["mode"] = std::string(to_string(cfg.mode()));
  j["lengths"] = lengths;
  j["directions"] = dirs;
  j["morse"] = {{"eigenvalues", rec.morse.eigenvalues},
                {"morse_index", rec.morse.morse_index},
                {"nullity", rec.morse.nullity},
                {"transversal_index", rec.morse.transversal_index},
                {"tau", rec.morse.tau},
                {"off_critical", rec.morse.off_critical}};
  if (!rec.classification) {
    j["classification"] = nullptr;
    return j;
  }
  const auto& c = *rec.classification;
  json pattern = json::array();
  for (auto f : c.pattern) pattern.push_back(std::string(to_string(f)));
  json cj;
  cj["label"] = std::string(to_string(c.label));
  cj["split"] = c.split;
  cj["pattern"] = pattern;
  cj["degraded"] = c.degraded;
  cj["mirror_normalized"] = c.mirror_normalized;
  if (c.circle) {
    cj["circle"] = {{"center", json::array({c.circle->center.x, c.circle->center.y})},
                    {"radius", num(c.circle->radius)},
                    {"rms", num(c.circle->rms)}};
  } else {
    cj["circle"] = nullptr;
  }
  cj["circle_rms_relative"] = num(c.circle_rms_relative);
  cj["diameter_circle"] = verdict_json(c.diameter_circle);
  cj["closing"] = verdict_json(c.closing);
  cj["diameter"] = verdict_json(c.diameter);
  cj["zigzag"] = verdict_json(c.zigzag);
  cj["parity_ok"] = c.parity_ok;
  cj["planar_subtype"] = c.planar_subtype ? json(std::string(to_string(*c.planar_subtype))) : json(nullptr);
  cj["value_identity_residual"] = num(c.value_identity_residual);
  j["classification"] = cj;
  return j;
}

CriticalPointRecord parse_record(const json& j) {
  std::vector<double> lengths = j.at("lengths").get<std::vector<double>>();
  std::vector<Vec3> dirs;
  for (const auto& d : j.at("directions")) dirs.push_back(as_vec3(d, "directions"));
  CriticalPointRecord rec{
      ArmConfiguration(ArmLengths(std::move(lengths)), std::move(dirs), parse_mode(j.at("mode").get<std::string>())),
      j.at("value").get<double>(), j.at("grad_norm").get<double>(), {}, std::nullopt,
      j.at("multiplicity").get<int>()};
  const json& m = j.at("morse");
  rec.morse.eigenvalues = m.at("eigenvalues").get<std::vector<double>>();
  rec.morse.morse_index = m.at("morse_index").get<int>();
  rec.morse.nullity = m.at("nullity").get<int>();
  rec.morse.transversal_index = m.at("transversal_index").get<int>();
  rec.morse.tau = m.at("tau").get<double>();
  rec.morse.off_critical = m.at("off_critical").get<bool>();

  const json& cj = j.at("classification");
  if (cj.is_null()) return rec;
  ClassificationReport c;
  c.label = parse_label(cj.at("label").get<std::string>());
  c.split = cj.at("split").get<int>();
  for (const auto& f : cj.at("pattern")) c.pattern.push_back(parse_joint_flag(f.get<std::string>()));
  c.degraded = cj.at("degraded").get<bool>();
  c.mirror_normalized = cj.at("mirror_normalized").get<bool>();
  if (!cj.at("circle").is_null()) {
    const json& cc = cj.at("circle");
    CircleFit fit;
    fit.center = {cc.at("center")[0].get<double>(), cc.at("center")[1].get<double>()};
    fit.radius = num_or_inf(cc.at("radius"));
    fit.rms = num_or_inf(cc.at("rms"));
    c.circle = fit;
  }
  c.circle_rms_relative = num_or_inf(cj.at("circle_rms_relative"));
  c.diameter_circle = parse_verdict(cj.at("diameter_circle"));
  c.closing = parse_verdict(cj.at("closing"));
  c.diameter = parse_verdict(cj.at("diameter"));
  c.zigzag = parse_verdict(cj.at("zigzag"));
  c.parity_ok = cj.at("parity_ok").get<bool>();
  if (!cj.at("planar_subtype").is_null()) {
    c.planar_subtype = parse_planar_subtype(cj.at("planar_subtype").get<std::string>());
  }
  c.value_identity_residual = num_or_inf(cj.at("value_identity_residual"));
  rec.classification = c;
  return rec;
}

json to_json(const ReportDocument& report) {
  json records = json::array();
  for (const auto& r : report.records) records.push_back(to_json(r));
  return {{"schema_version", kSchemaVersion},
          {"tool", "lvl"},
          {"tool_version", report.tool_version},
          {"input", report.input},
          {"records", records},
          {"summary",
           {{"restarts", report.summary.restarts},
            {"converged", report.summary.converged},
            {"failed", report.summary.failed},
            {"records", report.records.size()}}}};
}

ReportDocument parse_report(const json& doc) {
  check_schema_version(doc);
  ReportDocument r;
  r.tool_version = doc.at("tool_version").get<std::string>();
  r.input = doc.at("input");
  for (const auto& rec : doc.at("records")) r.records.push_back(parse_record(rec));
  const json& s = doc.at("summary");
  r.summary.restarts = s.at("restarts").get<int>();
  r.summary.converged = s.at("converged").get<int>();
  r.summary.failed = s.at("failed").get<int>();
  return r;
}

void write_csv(const ReportDocument& report, std::ostream& os) {
  os << "index,value,grad_norm,multiplicity,morse_index,nullity,transversal_index,label,split,"
        "pattern,degraded,parity_ok,closing_ok,diameter_ok,zigzag_ok,circle_radius,circle_rms,directions\n";
  char buf[64];
  auto g17 = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];
    os << i << ',' << g17(r.value) << ',' << g17(r.grad_norm) << ',' << r.multiplicity << ','
       << r.morse.morse_index << ',' << r.morse.nullity << ',' << r.morse.transversal_index << ',';
    if (r.classification) {
      const auto& c = *r.classification;
      std::string pattern;
      for (auto f : c.pattern) pattern += std::string(to_string(f)).substr(0, 1);
      os << to_string(c.label) << ',' << c.split << ',' << pattern << ',' << (c.degraded ? 1 : 0) << ','
         << (c.parity_ok ? 1 : 0) << ',' << (c.closing.ok ? 1 : 0) << ',' << (c.diameter.ok ? 1 : 0) << ','
         << (c.zigzag.ok ? 1 : 0) << ',' << (c.circle ? g17(c.circle->radius) : "") << ','
         << (c.circle ? g17(c.circle->rms) : "") << ',';
    } else {
      os << ",,,,,,,,,,";
    }
    std::string dirs;
    for (const auto& u : r.configuration.directions()) {
      if (!dirs.empty()) dirs += ' ';
      dirs += g17(u.x) + ' ' + g17(u.y) + ' ' + g17(u.z);
    }
    os << dirs << '\n';
  }
}

BottMorseInventory parse_inventory(const json& doc) {
  if (!doc.is_object()) fail("<root>", "expected a JSON object");
  check_schema_version(doc);
  auto poly = [](const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array of integer coefficients");
    std::vector<std::int64_t> c;
    for (std::size_t i = 0; i < j.size(); ++i) {
      c.push_back(as_integer(j[i], field + "[" + std::to_string(i) + "]"));
    }
    return IntPolynomial(std::move(c));
  };
  BottMorseInventory inv;
  inv.manifold = poly(require(doc, "manifold", ""), "manifold");
  const json& crit = require(doc, "criticals", "");
  if (!crit.is_array()) fail("criticals", "expected an array");
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const std::string base = "criticals[" + std::to_string(i) + "].";
    const long long lambda = as_integer(require(crit[i], "lambda", base), base + "lambda");
    if (lambda < 0) fail(base + "lambda", "must be >= 0");
    const IntPolynomial p = poly(require(crit[i], "poincare", base), base + "poincare");
    long long count = 1;
    if (crit[i].contains("count")) {
      count = as_integer(crit[i].at("count"), base + "count");
      if (count < 1) fail(base + "count", "must be >= 1");
    }
    for (long long k = 0; k < count; ++k) inv.criticals.push_back({static_cast<int>(lambda), p});
  }
  return inv;
}

}  // namespace lvl
