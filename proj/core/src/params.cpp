#include "oscmirror/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace oscmirror {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 7> kKnownKeys = {
    "omega0_rad_per_s", "omega_p_rad_per_s", "amplitude_m", "z0_m",
    "a21_per_s",        "c_m_per_s",         "orientation"};

double require_number(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ConfigError(key, std::string("missing required key '") + key + "'");
  }
  if (!it->is_number()) {
    throw ConfigError(key, std::string("key '") + key + "' must be a number");
  }
  return it->get<double>();
}

double optional_number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  return require_number(doc, key);
}

void require_finite(double v, const char* key) {
  if (!std::isfinite(v)) {
    throw ConfigError(key, std::string("key '") + key + "' must be finite");
  }
}

void require_positive(double v, const char* key) {
  require_finite(v, key);
  if (!(v > 0.0)) {
    throw ConfigError(key, std::string("key '") + key + "' must be > 0");
  }
}

void require_non_negative(double v, const char* key) {
  require_finite(v, key);
  if (v < 0.0) {
    throw ConfigError(key, std::string("key '") + key + "' must be >= 0");
  }
}

}  // namespace

std::string_view to_string(Orientation o) noexcept {
  switch (o) {
    case Orientation::x: return "x";
    case Orientation::y: return "y";
    case Orientation::z: return "z";
    case Orientation::random: return "random";
  }
  return "random";
}

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::pass: return "pass";
    case Severity::warn: return "warn";
    case Severity::fail: return "fail";
  }
  return "fail";
}

Orientation parse_orientation(std::string_view text) {
  if (text == "x") return Orientation::x;
  if (text == "y") return Orientation::y;
  if (text == "z") return Orientation::z;
  if (text == "random") return Orientation::random;
  throw ConfigError("orientation", "key 'orientation' must be one of x, y, z, random (got '" +
                                       std::string(text) + "')");
}

void PhysicalParams::validate() const {
  require_positive(omega0, "omega0_rad_per_s");
  require_non_negative(omega_p, "omega_p_rad_per_s");
  require_non_negative(amplitude, "amplitude_m");
  require_positive(z0, "z0_m");
  require_positive(a21, "a21_per_s");
  require_positive(c, "c_m_per_s");
  if (!(amplitude < z0)) {
    throw ConfigError("amplitude_m", "key 'amplitude_m' must be smaller than 'z0_m'");
  }
}

PhysicalParams parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config document: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("", "config document must be a JSON object");
  }
  for (const auto& [key, _] : doc.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw ConfigError(key, "unknown key '" + key + "'");
    }
  }

  PhysicalParams p;
  p.omega0 = require_number(doc, "omega0_rad_per_s");
  p.omega_p = require_number(doc, "omega_p_rad_per_s");
  p.amplitude = require_number(doc, "amplitude_m");
  p.z0 = require_number(doc, "z0_m");
  p.a21 = optional_number(doc, "a21_per_s", 1.0);
  p.c = optional_number(doc, "c_m_per_s", kSpeedOfLight);
  if (auto it = doc.find("orientation"); it != doc.end()) {
    if (!it->is_string()) {
      throw ConfigError("orientation", "key 'orientation' must be a string");
    }
    p.orientation = parse_orientation(it->get<std::string>());
  }
  p.validate();
  return p;
}

PhysicalParams load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("", "cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_config_json(const PhysicalParams& p) {
  json doc = {
      {"omega0_rad_per_s", p.omega0},
      {"omega_p_rad_per_s", p.omega_p},
      {"amplitude_m", p.amplitude},
      {"z0_m", p.z0},
      {"a21_per_s", p.a21},
      {"c_m_per_s", p.c},
      {"orientation", std::string(to_string(p.orientation))},
  };
  return doc.dump();
}

DerivedScales derive_scales(const PhysicalParams& p) noexcept {
  DerivedScales s;
  s.k0 = p.omega0 / p.c;
  s.u0 = 2.0 * s.k0 * p.z0;
  s.eps_geom = p.amplitude / p.z0;
  s.eps_wave = p.amplitude * s.k0;
  s.v_ratio = p.amplitude * p.omega_p / p.c;
  s.adiab_freq = p.omega_p / p.omega0;
  s.adiab_travel = p.omega_p * p.z0 / p.c;
  return s;
}

ValidationReport validate_adiabatic(const PhysicalParams& p,
                                    const AdiabaticThresholds& thresholds) {
  const DerivedScales s = derive_scales(p);
  ValidationReport report;
  auto add = [&report](std::string name, double value, double warn_above) {
    Severity sev = Severity::pass;
    if (!(value < 1.0)) {
      sev = Severity::fail;
    } else if (value > warn_above) {
      sev = Severity::warn;
    }
    report.checks.push_back({std::move(name), value, warn_above, sev});
    report.overall = std::max(report.overall, sev);
  };
  add("adiab_freq", s.adiab_freq, thresholds.adiab_freq);
  add("adiab_travel", s.adiab_travel, thresholds.adiab_travel);
  add("v_ratio", s.v_ratio, thresholds.v_ratio);
  add("eps_geom", s.eps_geom, thresholds.eps_geom);
  add("eps_wave_sq", s.eps_wave * s.eps_wave, thresholds.eps_wave_sq);
  return report;
}

}  // namespace oscmirror
