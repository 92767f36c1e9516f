#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oscmirror/oracle.hpp"
#include "oscmirror/params.hpp"
#include "oscmirror/rate.hpp"
#include "oscmirror/spectrum.hpp"

namespace oscmirror::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kValidationFailed = 3,
  kIo = 4,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResolvabilityReport {
  double omega_p = 0.0;
  double linewidth = 0.0;
  bool resolvable = false;
  double margin = 0.0;  // omega_p / linewidth
};

/// Lateral peaks are resolvable when they sit further from the line centre
/// than the linewidth. Throws std::invalid_argument unless linewidth > 0.
ResolvabilityReport resolvability(const PhysicalParams& p, double linewidth);

std::string resolvability_json(const ResolvabilityReport& r);

// "%.8e": nine significant digits.
std::string format_value(double v);

void write_rate_csv(const RateSeries& series, std::ostream& os);
void write_spectrum_csv(const SpectrumSeries& series, std::ostream& os);
void write_surface_csv(std::span<const SurfaceRow> rows, std::ostream& os);
std::string peaks_json(const PeakReport& report);
std::string validation_json(const std::vector<oracle::OracleReport>& reports);

/// Writes the spectrum CSV to `path`; throws IoError if the file cannot be written.
void emit_spectrum(const SpectrumSeries& series, const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Parses and executes one command. Never throws; failures become an exit
/// code plus a single `error:<category>:<message>` line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oscmirror::cli
