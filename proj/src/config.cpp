#include "cdlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cdlab/errors.hpp"
#include "cdlab/stabilization.hpp"

namespace cdlab {

using nlohmann::json;

RunConfig preset_config(std::string_view name) {
  RunConfig c;
  int m = 0;
  if (name == "paper-16") m = 16;
  else if (name == "paper-32") m = 32;
  else if (name == "paper-64") m = 64;
  else if (name == "paper-128") m = 128;
  else {
    throw ValidationError("unknown preset '" + std::string(name) +
                          "' (expected paper-16, paper-32, paper-64 or paper-128)");
  }
  c.mesh_x = m;
  c.mesh_y = m;
  return c;
}

void validate(const RunConfig& c) {
  std::vector<std::string> p;
  if (c.mesh_x < 4 || c.mesh_y < 4) p.push_back("mesh dimensions must be >= 4");
  if (c.degree != 1 && c.degree != 2) p.push_back("degree must be 1 or 2");
  if (!(c.length_x > 0.0) || !(c.length_y > 0.0)) p.push_back("domain lengths must be > 0");
  if (!c.velocity.allFinite()) p.push_back("velocity must be finite");
  if (!(c.diffusivity >= 0.0) || !std::isfinite(c.diffusivity)) {
    p.push_back("diffusivity must be finite and >= 0");
  }
  if (c.formulation == FormulationKind::DynamicOrthogonal && !(c.diffusivity > 0.0)) {
    p.push_back("DO requires positive diffusivity");
  }
  if (c.cfl.has_value() == c.dt.has_value()) p.push_back("exactly one of cfl and dt must be given");
  if (c.cfl) {
    if (!(*c.cfl > 0.0)) p.push_back("cfl must be > 0");
    if (c.velocity.cwiseAbs().maxCoeff() == 0.0) p.push_back("cfl needs a nonzero velocity");
  }
  if (c.dt && !(*c.dt > 0.0)) p.push_back("dt must be > 0");
  if (!(c.end_time > 0.0) || !std::isfinite(c.end_time)) p.push_back("end_time must be > 0");

  const auto& a = c.alpha;
  try {
    if (a.preset == "raw") {
      make_alpha(a.alpha_f, a.alpha_m, a.gamma, 1.0);
    } else {
      make_alpha(a.preset, 1.0, a.alpha_f);
    }
  } catch (const ValidationError& err) {
    for (const auto& s : err.problems()) p.push_back("alpha: " + s);
  }
  const bool stabilized = traits(c.formulation).stabilized;
  if (stabilized && a.preset == "raw" && !(a.alpha_f > 0.0)) {
    p.push_back("stabilized formulations need alpha_f > 0");
  }
  if (c.r_switch != 1 && c.r_switch != 2) p.push_back("r_switch must be 1 or 2");
  if (c.inverse_constant && !(*c.inverse_constant > 0.0)) p.push_back("inverse_constant must be > 0");
  if (!(c.multiplier_regularization >= 0.0)) p.push_back("multiplier_regularization must be >= 0");
  if (c.initial.n < 0) p.push_back("initial_condition.n must be >= 0");
  if (!(c.initial.h_c > 0.0)) p.push_back("initial_condition.h_c must be > 0");
  if (c.output_dir.empty()) p.push_back("output.dir must not be empty");
  if (c.output_every < 1) p.push_back("output.every must be >= 1");
  for (double t : c.snapshot_times) {
    if (!(t >= 0.0) || t > c.end_time * (1.0 + 1e-12)) {
      p.push_back("snapshot time " + std::to_string(t) + " outside [0, end_time]");
    }
  }
  if (!p.empty()) throw ValidationError(std::move(p));
}

namespace {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) problems_.push_back("unknown key '" + where + key + "'");
    }
  }

  template <typename T>
  void read(const json& obj, const std::string& key, const std::string& where, T& out) {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      problems_.push_back("'" + where + key + "' has the wrong type");
    }
  }

  void read_vec2(const json& obj, const std::string& key, const std::string& where,
                 Eigen::Vector2d& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      problems_.push_back("'" + where + key + "' must be an array of two numbers");
      return;
    }
    out = {v[0].get<double>(), v[1].get<double>()};
  }

  bool is_object(const json& obj, const std::string& key) {
    if (!obj.contains(key)) return false;
    if (!obj.at(key).is_object()) {
      problems_.push_back("'" + key + "' must be an object");
      return false;
    }
    return true;
  }

 private:
  std::vector<std::string>& problems_;
};

}  // namespace

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("configuration must be a JSON object");
  std::vector<std::string> p;
  Reader r(p);
  RunConfig c;
  if (doc.contains("preset")) {
    if (!doc.at("preset").is_string()) {
      p.push_back("'preset' must be a string");
    } else {
      try {
        c = preset_config(doc.at("preset").get<std::string>());
      } catch (const ValidationError& err) {
        p.push_back(err.what());
      }
    }
  }
  r.check_keys(doc, "",
               {"preset", "formulation", "mesh", "degree", "domain", "velocity", "diffusivity",
                "cfl", "dt", "end_time", "alpha", "r_switch", "inverse_constant",
                "multiplier_regularization", "initial_condition", "output"});
  if (doc.contains("formulation")) {
    std::string name;
    r.read(doc, "formulation", "", name);
    try {
      c.formulation = parse_formulation(name);
    } catch (const ValidationError& err) {
      p.push_back(err.what());
    }
  }
  if (doc.contains("mesh")) {
    const auto& m = doc.at("mesh");
    if (m.is_number_integer()) {
      c.mesh_x = c.mesh_y = m.get<int>();
    } else if (m.is_array() && m.size() == 2 && m[0].is_number_integer() &&
               m[1].is_number_integer()) {
      c.mesh_x = m[0].get<int>();
      c.mesh_y = m[1].get<int>();
    } else {
      p.push_back("'mesh' must be an integer or an array of two integers");
    }
  }
  r.read(doc, "degree", "", c.degree);
  if (doc.contains("domain")) {
    Eigen::Vector2d d(c.length_x, c.length_y);
    r.read_vec2(doc, "domain", "", d);
    c.length_x = d.x();
    c.length_y = d.y();
  }
  r.read_vec2(doc, "velocity", "", c.velocity);
  r.read(doc, "diffusivity", "", c.diffusivity);
  if (doc.contains("cfl") || doc.contains("dt")) {
    c.cfl.reset();
    c.dt.reset();
    if (doc.contains("cfl")) {
      double v = 0.0;
      r.read(doc, "cfl", "", v);
      c.cfl = v;
    }
    if (doc.contains("dt")) {
      double v = 0.0;
      r.read(doc, "dt", "", v);
      c.dt = v;
    }
  }
  r.read(doc, "end_time", "", c.end_time);
  if (r.is_object(doc, "alpha")) {
    const auto& a = doc.at("alpha");
    r.check_keys(a, "alpha.", {"preset", "alpha_f", "alpha_m", "gamma"});
    const bool raw = a.contains("alpha_m") || a.contains("gamma");
    c.alpha.preset = raw ? "raw" : "crank-nicolson";
    r.read(a, "preset", "alpha.", c.alpha.preset);
    r.read(a, "alpha_f", "alpha.", c.alpha.alpha_f);
    r.read(a, "alpha_m", "alpha.", c.alpha.alpha_m);
    r.read(a, "gamma", "alpha.", c.alpha.gamma);
    if (raw && c.alpha.preset != "raw") {
      p.push_back("alpha_m/gamma are only accepted with preset 'raw'");
    }
  }
  r.read(doc, "r_switch", "", c.r_switch);
  if (doc.contains("inverse_constant")) {
    double v = 0.0;
    r.read(doc, "inverse_constant", "", v);
    c.inverse_constant = v;
  }
  r.read(doc, "multiplier_regularization", "", c.multiplier_regularization);
  if (r.is_object(doc, "initial_condition")) {
    const auto& ic = doc.at("initial_condition");
    r.check_keys(ic, "initial_condition.", {"type", "n", "h_c", "center"});
    std::string type = "block";
    r.read(ic, "type", "initial_condition.", type);
    if (type != "block") p.push_back("initial_condition.type must be 'block'");
    r.read(ic, "n", "initial_condition.", c.initial.n);
    r.read(ic, "h_c", "initial_condition.", c.initial.h_c);
    r.read_vec2(ic, "center", "initial_condition.", c.initial.center);
  }
  if (r.is_object(doc, "output")) {
    const auto& o = doc.at("output");
    r.check_keys(o, "output.", {"dir", "every", "snapshots"});
    r.read(o, "dir", "output.", c.output_dir);
    r.read(o, "every", "output.", c.output_every);
    r.read(o, "snapshots", "output.", c.snapshot_times);
  }
  if (!p.empty()) throw ValidationError(std::move(p));
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open configuration file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ValidationError("invalid JSON in " + path.string() + ": " + err.what());
  }
  return config_from_json(doc);
}

json config_to_json(const RunConfig& c) {
  json doc;
  doc["formulation"] = std::string(short_name(c.formulation));
  doc["mesh"] = {c.mesh_x, c.mesh_y};
  doc["degree"] = c.degree;
  doc["domain"] = {c.length_x, c.length_y};
  doc["velocity"] = {c.velocity.x(), c.velocity.y()};
  doc["diffusivity"] = c.diffusivity;
  if (c.cfl) doc["cfl"] = *c.cfl;
  if (c.dt) doc["dt"] = *c.dt;
  doc["end_time"] = c.end_time;
  json a;
  a["preset"] = c.alpha.preset;
  if (c.alpha.preset == "raw") {
    a["alpha_f"] = c.alpha.alpha_f;
    a["alpha_m"] = c.alpha.alpha_m;
    a["gamma"] = c.alpha.gamma;
  } else if (c.alpha.preset == "energy-decaying") {
    a["alpha_f"] = c.alpha.alpha_f;
  }
  doc["alpha"] = a;
  doc["r_switch"] = c.r_switch;
  if (c.inverse_constant) doc["inverse_constant"] = *c.inverse_constant;
  doc["multiplier_regularization"] = c.multiplier_regularization;
  doc["initial_condition"] = {{"type", "block"},
                              {"n", c.initial.n},
                              {"h_c", c.initial.h_c},
                              {"center", {c.initial.center.x(), c.initial.center.y()}}};
  doc["output"] = {{"dir", c.output_dir}, {"every", c.output_every},
                   {"snapshots", c.snapshot_times}};
  return doc;
}

ResolvedRun resolve(const RunConfig& c) {
  validate(c);
  ResolvedRun r;
  double dt = 0.0;
  if (c.cfl) {
    const double h = std::min(c.length_x / c.mesh_x, c.length_y / c.mesh_y);
    dt = *c.cfl * h / c.velocity.cwiseAbs().maxCoeff();
    r.cfl_convention = "dt = cfl * h / max(|a_x|, |a_y|)";
  } else {
    dt = *c.dt;
    r.cfl_convention = "explicit dt";
  }
  r.steps = static_cast<int>(std::ceil(c.end_time / dt - 1e-9));
  if (r.steps < 1) r.steps = 1;
  r.dt = c.end_time / r.steps;
  if (c.alpha.preset == "raw") {
    r.alpha = make_alpha(c.alpha.alpha_f, c.alpha.alpha_m, c.alpha.gamma, r.dt);
  } else {
    r.alpha = make_alpha(c.alpha.preset, r.dt, c.alpha.alpha_f);
  }
  r.inverse_constant = c.inverse_constant ? *c.inverse_constant : default_inverse_constant(c.degree);
  return r;
}

SplineSpace2D make_space(const RunConfig& c) {
  return SplineSpace2D(c.degree, c.mesh_x, c.mesh_y, c.length_x, c.length_y);
}

PhysicsParams make_physics(const RunConfig& c, const ResolvedRun& r) {
  PhysicsParams p;
  p.velocity = c.velocity;
  p.diffusivity = c.diffusivity;
  p.inverse_constant = r.inverse_constant;
  p.r_switch = c.r_switch;
  p.multiplier_regularization = c.multiplier_regularization;
  return p;
}

}  // namespace cdlab
