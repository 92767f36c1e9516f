#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oscmirror {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Orientation of the atomic transition dipole relative to the mirror plane
/// (x, y parallel; z perpendicular; random = isotropic average).
enum class Orientation { x, y, z, random };

std::string_view to_string(Orientation o) noexcept;

/// Thrown for any malformed or out-of-range physical input. `key()` names
/// the offending configuration key (empty when the whole document is bad).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

Orientation parse_orientation(std::string_view text);

/// Atom, mirror and field configuration. All rates downstream are expressed
/// in units of `a21`.
struct PhysicalParams {
  double omega0 = 0.0;     ///< atomic transition angular frequency [rad/s]
  double omega_p = 0.0;    ///< mirror oscillation angular frequency [rad/s]
  double amplitude = 0.0;  ///< mirror oscillation amplitude a [m]
  double z0 = 0.0;         ///< mean atom-mirror distance [m]
  double a21 = 1.0;        ///< Einstein A coefficient [1/s]
  double c = kSpeedOfLight;
  Orientation orientation = Orientation::random;

  /// Throws ConfigError naming the first violated field.
  void validate() const;
};

/// Reads a JSON config file (see README for the key set). Unknown keys are
/// rejected so that typos never silently fall back to defaults.
PhysicalParams load_config(const std::filesystem::path& path);

/// Same as load_config, from the document text.
PhysicalParams parse_config(std::string_view json_text);

/// Canonical JSON rendering of the parameters using the config key names.
std::string to_config_json(const PhysicalParams& p);

struct DerivedScales {
  double k0 = 0.0;            ///< omega0 / c [1/m]
  double u0 = 0.0;            ///< 2 k0 z0
  double eps_geom = 0.0;      ///< amplitude / z0
  double eps_wave = 0.0;      ///< amplitude k0
  double v_ratio = 0.0;       ///< amplitude omega_p / c
  double adiab_freq = 0.0;    ///< omega_p / omega0
  double adiab_travel = 0.0;  ///< omega_p z0 / c
};

DerivedScales derive_scales(const PhysicalParams& p) noexcept;

enum class Severity { pass = 0, warn = 1, fail = 2 };

std::string_view to_string(Severity s) noexcept;

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Severity severity = Severity::pass;
};

struct ValidationReport {
  std::vector<Check> checks;
  Severity overall = Severity::pass;
};

/// Warn thresholds for the slow-mirror regime. Any ratio >= 1 fails
/// regardless of these values.
struct AdiabaticThresholds {
  double adiab_freq = 1e-3;
  double adiab_travel = 1e-2;
  double v_ratio = 1e-3;
  double eps_geom = 0.3;
  double eps_wave_sq = 0.3;
};

ValidationReport validate_adiabatic(const PhysicalParams& p,
                                    const AdiabaticThresholds& thresholds = {});

}  // namespace oscmirror
