#include "sphere_servo/scenario_io.hpp"

#include <fstream>
#include <set>

#include "sphere_servo/error.hpp"

namespace sphere_servo {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfigInvalid, path + ": " + what);
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat_json(const Mat3& m) {
  json a = json::array();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a.push_back(m(i, j));
  return a;
}

// Reader over one JSON object that tracks which keys were consumed so that
// leftovers can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) invalid(path_.empty() ? "<root>" : path_, "expected an object");
  }
  ~ObjectReader() = default;

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) invalid(child(key), "expected a number");
      out = v->get<double>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) invalid(child(key), "expected a boolean");
      out = v->get<bool>();
    }
  }

  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) invalid(child(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void vec3(const std::string& key, Vec3& out) {
    if (const json* v = find(key)) out = read_array<3>(*v, child(key));
  }

  void mat3(const std::string& key, Mat3& out) {
    if (const json* v = find(key)) {
      const auto flat = read_array<9>(*v, child(key));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = flat[3 * i + j];
    }
  }

  template <typename F>
  void object(const std::string& key, F&& f) {
    if (const json* v = find(key)) {
      ObjectReader sub(*v, child(key));
      f(sub);
      sub.finish();
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(child(it.key()), "unknown field");
    }
  }

 private:
  template <int N>
  static Eigen::Matrix<double, N, 1> read_array(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != N) invalid(path, "expected an array of " + std::to_string(N) + " numbers");
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
      if (!v[i].is_number()) invalid(path + "[" + std::to_string(i) + "]", "expected a number");
      out[i] = v[i].get<double>();
    }
    return out;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string velocity_source_name(VelocitySource s) {
  return s == VelocitySource::kGroundTruth ? "ground_truth" : "differentiated";
}

std::string actuation_name(ActuationModel a) {
  return a == ActuationModel::kIdealAcceleration ? "ideal_acceleration" : "rigid_body";
}

}  // namespace

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["initial"]["vehicle"] = {{"position", vec_json(c.initial.vehicle.position)},
                             {"velocity", vec_json(c.initial.vehicle.velocity)},
                             {"attitude", mat_json(c.initial.vehicle.attitude.matrix())}};
  j["initial"]["target"] = {{"position", vec_json(c.initial.target.position)},
                            {"velocity", vec_json(c.initial.target.velocity)},
                            {"acceleration", vec_json(c.initial.target.acceleration)}};
  j["target_radius"] = c.target_radius;
  j["reference"] = {{"bearing", vec_json(c.reference.bearing.vec())}, {"theta", c.reference.theta}};
  j["gains"] = {{"k1", c.gains.k1},
                {"k2", c.gains.k2},
                {"K3", mat_json(c.gains.K3)},
                {"k_r", c.gains.k_r},
                {"K_rho", mat_json(c.gains.K_rho)},
                {"K_R", mat_json(c.gains.K_R)},
                {"include_wd_dot", c.gains.include_wd_dot}};
  j["observers"] = {{"r_hat", c.observers.r_hat}, {"rho_hat", vec_json(c.observers.rho_hat)}};
  j["noise"] = {{"enabled", c.noise.enabled},
                {"bearing_angle_std_deg", c.noise.bearing_angle_std_deg},
                {"theta_std_deg", c.noise.theta_std_deg},
                {"rng_seed", c.noise.rng_seed}};
  j["lowpass_cutoff_hz"] = c.resolved_lowpass_cutoff_hz();
  j["visibility"] = {{"varphi", c.visibility.varphi}};
  j["vehicle"] = {{"mass", c.vehicle.mass},
                  {"gravity", c.vehicle.gravity},
                  {"max_thrust", c.vehicle.max_thrust}};
  j["timing"] = {{"dt_physics", c.dt_physics}, {"dt_control", c.dt_control}, {"duration", c.duration}};
  j["simulation"] = {{"velocity_source", velocity_source_name(c.velocity_source)},
                     {"actuation", actuation_name(c.actuation)}};
  return j;
}

ScenarioConfig scenario_from_json(const json& doc, const ScenarioConfig& base) {
  ScenarioConfig c = base;
  ObjectReader root(doc, "");

  root.object("initial", [&](ObjectReader& init) {
    init.object("vehicle", [&](ObjectReader& v) {
      v.vec3("position", c.initial.vehicle.position);
      v.vec3("velocity", c.initial.vehicle.velocity);
      Mat3 r = c.initial.vehicle.attitude.matrix();
      v.mat3("attitude", r);
      if (!is_rotation(r)) invalid("initial.vehicle.attitude", "must be a proper rotation");
      c.initial.vehicle.attitude = Rotation3::unchecked(r);
    });
    init.object("target", [&](ObjectReader& t) {
      t.vec3("position", c.initial.target.position);
      t.vec3("velocity", c.initial.target.velocity);
      t.vec3("acceleration", c.initial.target.acceleration);
    });
  });
  root.number("target_radius", c.target_radius);
  root.object("reference", [&](ObjectReader& r) {
    Vec3 bearing = c.reference.bearing.vec();
    r.vec3("bearing", bearing);
    if (!(bearing.norm() > 0.0) || !bearing.allFinite()) {
      invalid("reference.bearing", "must be a finite non-zero vector");
    }
    c.reference.bearing = UnitVector3(bearing);
    r.number("theta", c.reference.theta);
  });
  root.object("gains", [&](ObjectReader& g) {
    g.number("k1", c.gains.k1);
    g.number("k2", c.gains.k2);
    g.mat3("K3", c.gains.K3);
    g.number("k_r", c.gains.k_r);
    g.mat3("K_rho", c.gains.K_rho);
    g.mat3("K_R", c.gains.K_R);
    g.boolean("include_wd_dot", c.gains.include_wd_dot);
  });
  root.object("observers", [&](ObjectReader& o) {
    o.number("r_hat", c.observers.r_hat);
    o.vec3("rho_hat", c.observers.rho_hat);
  });
  root.object("noise", [&](ObjectReader& n) {
    n.boolean("enabled", c.noise.enabled);
    n.number("bearing_angle_std_deg", c.noise.bearing_angle_std_deg);
    n.number("theta_std_deg", c.noise.theta_std_deg);
    n.unsigned_integer("rng_seed", c.noise.rng_seed);
  });
  if (const json* lp = root.find("lowpass_cutoff_hz")) {
    if (lp->is_null()) {
      c.lowpass_cutoff_hz.reset();
    } else if (lp->is_number()) {
      c.lowpass_cutoff_hz = lp->get<double>();
    } else {
      invalid("lowpass_cutoff_hz", "expected a number or null");
    }
  }
  root.object("visibility", [&](ObjectReader& v) { v.number("varphi", c.visibility.varphi); });
  root.object("vehicle", [&](ObjectReader& v) {
    v.number("mass", c.vehicle.mass);
    v.number("gravity", c.vehicle.gravity);
    v.number("max_thrust", c.vehicle.max_thrust);
  });
  root.object("timing", [&](ObjectReader& t) {
    t.number("dt_physics", c.dt_physics);
    t.number("dt_control", c.dt_control);
    t.number("duration", c.duration);
  });
  root.object("simulation", [&](ObjectReader& s) {
    if (const json* v = s.find("velocity_source")) {
      if (*v == "differentiated") c.velocity_source = VelocitySource::kDifferentiated;
      else if (*v == "ground_truth") c.velocity_source = VelocitySource::kGroundTruth;
      else invalid("simulation.velocity_source", "expected \"differentiated\" or \"ground_truth\"");
    }
    if (const json* v = s.find("actuation")) {
      if (*v == "rigid_body") c.actuation = ActuationModel::kRigidBody;
      else if (*v == "ideal_acceleration") c.actuation = ActuationModel::kIdealAcceleration;
      else invalid("simulation.actuation", "expected \"rigid_body\" or \"ideal_acceleration\"");
    }
  });
  root.finish();

  c.validate();
  return c;
}

ScenarioConfig load_scenario_file(const std::string& path, const ScenarioConfig& base) {
  std::ifstream is(path);
  if (!is) invalid(path, "cannot open scenario file");
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    invalid(path, e.what());
  }
  return scenario_from_json(doc, base);
}

void set_json_path(json& doc, const std::string& dotted_path, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_path.find('.', start);
    const std::string key = dotted_path.substr(start, dot - start);
    if (key.empty()) invalid(dotted_path, "empty path component");
    if (!node->is_object() && !node->is_null()) invalid(dotted_path, "path crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace sphere_servo
