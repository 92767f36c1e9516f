#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace oscmirror::cli {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string out;
  unsigned workers = 0;
  double t = kNaN;
  double t_start = 0.0;
  double t_end = kNaN;
  std::size_t n = 0;  // 0: per-command default
  double delta_min = kNaN;
  double delta_max = kNaN;
  std::string order = "exact";
  bool envelope = false;
  double linewidth = kNaN;
  std::size_t n_delta = 801;
  double prominence = 0.02;
  std::size_t nodes = 128;
  // sweep
  std::string param;
  double from = kNaN;
  double to = kNaN;
  std::size_t steps = 0;
  std::string scale = "lin";
  std::string quantity = "spectrum";
  std::string out_dir;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

double require_set(double v, const char* flag) {
  require(!std::isnan(v), std::string(flag) + " is required for this command");
  return v;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

void finish_write(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto os = open_for_write(path);
  os << text;
  finish_write(os, path);
}

// Arguments that change the data, in order, without the output location or
// worker count.
std::string canonical_args(const std::vector<std::string>& args) {
  std::string joined;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--out" || a == "--workers" || a == "--out-dir") {
      ++i;
      continue;
    }
    if (a.starts_with("--out=") || a.starts_with("--workers=") || a.starts_with("--out-dir=")) {
      continue;
    }
    joined += a;
    joined += '\x1f';
  }
  return joined;
}

struct Context {
  std::string command;
  const std::vector<std::string>& args;
  std::ostream& out;
  std::ostream& err;
  Options opt;
  PhysicalParams params;

  std::string inputs_hash() const {
    return hex64(fnv1a(to_config_json(params) + '\n' + canonical_args(args)));
  }

  json meta(json extra = json::object()) const {
    json m = {{"command", command},
              {"config", json::parse(to_config_json(params))},
              {"inputs_hash", inputs_hash()}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    return m;
  }

  // Writes to --out (plus its .meta.json) or to stdout.
  void emit(const std::string& body, json extra = json::object()) const {
    if (opt.out.empty()) {
      out << body;
      return;
    }
    write_text(opt.out, body);
    write_text(opt.out + ".meta.json", meta(std::move(extra)).dump(2) + "\n");
  }

  void warn_adiabatic() const {
    for (const Check& c : validate_adiabatic(params).checks) {
      if (c.severity == Severity::pass) continue;
      err << "warning:adiabatic:" << c.name << "=" << format_value(c.value) << " ("
          << to_string(c.severity) << ", threshold " << format_value(c.threshold) << ")\n";
    }
  }
};

UniformGrid detuning_grid(const Options& o, const PhysicalParams& p, double t, std::size_t n) {
  // Default window covers the +-2 wp sidebands with room for their tails;
  // without motion it falls back to twenty linewidths.
  const double half = p.omega_p > 0.0 ? 4.0 * p.omega_p : 40.0 * std::numbers::pi / t;
  return {std::isnan(o.delta_min) ? -half : o.delta_min,
          std::isnan(o.delta_max) ? half : o.delta_max, n};
}

RateOrder parse_order(const std::string& s) {
  return s == "first" ? RateOrder::first_order : RateOrder::exact;
}

RateSeries compute_rate(const Options& o, const PhysicalParams& p) {
  const double t_end = require_set(o.t_end, "--t-end");
  return rate_series(p, o.t_start, t_end, o.n == 0 ? 1000 : o.n, parse_order(o.order),
                     o.workers);
}

SpectrumSeries compute_spectrum(const Options& o, const PhysicalParams& p, bool envelope_it) {
  const double t = require_set(o.t, "--t");
  require(t > 0.0, "--t must be positive");
  SpectrumSeries s = spectrum_series(p, detuning_grid(o, p, t, o.n == 0 ? 8001 : o.n), t, o.workers);
  return envelope_it ? envelope(s) : s;
}

PeakReport compute_peaks(const Options& o, const PhysicalParams& p) {
  return find_peaks(compute_spectrum(o, p, true), o.prominence);
}

std::string rate_text(const RateSeries& s) {
  std::ostringstream os;
  write_rate_csv(s, os);
  return os.str();
}

std::string spectrum_text(const SpectrumSeries& s) {
  std::ostringstream os;
  write_spectrum_csv(s, os);
  return os.str();
}

void report_negative(const Context& ctx, const SpectrumSeries& s) {
  if (s.negative_samples > 0) {
    ctx.err << "warning:perturbative:" << s.negative_samples
            << " samples with p_total < 0; the amplitude is outside the expansion's range\n";
  }
}

ResolvabilityReport resolvability_for(const Context& ctx) {
  const double lw = std::isnan(ctx.opt.linewidth) ? ctx.params.a21 : ctx.opt.linewidth;
  return resolvability(ctx.params, lw);
}

int cmd_rate(Context& ctx) {
  const RateSeries s = compute_rate(ctx.opt, ctx.params);
  ctx.emit(rate_text(s));
  return kOk;
}

int cmd_spectrum(Context& ctx) {
  const ResolvabilityReport r = resolvability_for(ctx);
  const SpectrumSeries s = compute_spectrum(ctx.opt, ctx.params, ctx.opt.envelope);
  report_negative(ctx, s);
  ctx.emit(spectrum_text(s), {{"resolvability", json::parse(resolvability_json(r))}});
  if (!ctx.opt.out.empty()) ctx.out << resolvability_json(r) << "\n";
  return kOk;
}

int cmd_peaks(Context& ctx) {
  const ResolvabilityReport r = resolvability_for(ctx);
  const PeakReport report = compute_peaks(ctx.opt, ctx.params);
  ctx.emit(peaks_json(report) + "\n", {{"resolvability", json::parse(resolvability_json(r))}});
  if (!ctx.opt.out.empty()) ctx.out << resolvability_json(r) << "\n";
  return kOk;
}

int cmd_surface(Context& ctx) {
  const Options& o = ctx.opt;
  const double t_end = require_set(o.t_end, "--t-end");
  const std::size_t n_t = o.n == 0 ? 50 : o.n;
  const UniformGrid times{o.t_start, t_end, n_t};
  times.validate("surface time grid");
  const auto tv = times.values();
  // The detuning window is sized on the shortest positive time.
  double t_ref = t_end;
  for (double t : tv) {
    if (t > 0.0) {
      t_ref = t;
      break;
    }
  }
  const auto rows =
      spectrum_surface(ctx.params, detuning_grid(o, ctx.params, t_ref, o.n_delta), tv, o.workers);
  std::ostringstream os;
  write_surface_csv(rows, os);
  ctx.emit(os.str());
  return kOk;
}

int cmd_validate(Context& ctx) {
  oracle::SuiteOptions so;
  so.t = std::isnan(ctx.opt.t) ? 1e-6 : ctx.opt.t;
  require(so.t > 0.0, "--t must be positive");
  so.angular_nodes = ctx.opt.nodes;
  so.workers = ctx.opt.workers;
  const auto reports = oracle::run_validation_suite(ctx.params, so);
  const bool all_pass =
      std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  ctx.emit(validation_json(reports) + "\n", {{"all_pass", all_pass}});
  if (!all_pass) {
    std::size_t failed = 0;
    for (const auto& r : reports) failed += r.pass ? 0 : 1;
    ctx.err << "error:validation:" << failed << " of " << reports.size()
            << " oracle checks failed\n";
    return kValidationFailed;
  }
  return kOk;
}

double* sweep_target(PhysicalParams& p, const std::string& name) {
  if (name == "omega0" || name == "omega0_rad_per_s") return &p.omega0;
  if (name == "omega_p" || name == "omega_p_rad_per_s") return &p.omega_p;
  if (name == "amplitude" || name == "amplitude_m") return &p.amplitude;
  if (name == "z0" || name == "z0_m") return &p.z0;
  if (name == "a21" || name == "a21_per_s") return &p.a21;
  throw UsageError("--param must be one of omega0, omega_p, amplitude, z0, a21 (got '" + name +
                   "')");
}

std::vector<double> sweep_values(const Options& o) {
  const double from = require_set(o.from, "--from");
  const double to = require_set(o.to, "--to");
  require(o.steps >= 1, "--steps must be at least 1");
  std::vector<double> v(o.steps);
  const bool geom = o.scale == "geom";
  if (geom) require(from > 0.0 && to > 0.0, "--scale geom requires positive --from and --to");
  for (std::size_t i = 0; i < o.steps; ++i) {
    if (o.steps == 1) {
      v[i] = from;
      continue;
    }
    const double f = static_cast<double>(i) / static_cast<double>(o.steps - 1);
    v[i] = geom ? from * std::pow(to / from, f) : from + (to - from) * f;
  }
  v.back() = o.steps > 1 ? to : from;
  return v;
}

int cmd_sweep(Context& ctx) {
  const Options& o = ctx.opt;
  require(!o.out_dir.empty(), "--out-dir is required for sweep");
  sweep_target(ctx.params, o.param);  // reject unknown names before any work
  const std::vector<double> values = sweep_values(o);
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) throw IoError("cannot create '" + o.out_dir + "': " + ec.message());

  json points = json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    PhysicalParams p = ctx.params;
    *sweep_target(p, o.param) = values[i];
    p.validate();
    char name[64];
    const char* ext = o.quantity == "peaks" ? "json" : "csv";
    std::snprintf(name, sizeof name, "%s_%03zu.%s", o.quantity.c_str(), i, ext);
    std::string body;
    if (o.quantity == "rate") {
      body = rate_text(compute_rate(o, p));
    } else if (o.quantity == "peaks") {
      body = peaks_json(compute_peaks(o, p)) + "\n";
    } else {
      const SpectrumSeries s = compute_spectrum(o, p, o.envelope);
      report_negative(ctx, s);
      body = spectrum_text(s);
    }
    write_text(std::filesystem::path(o.out_dir) / name, body);
    points.push_back({{"index", i}, {"value", values[i]}, {"file", name}});
  }
  json index = ctx.meta({{"param", o.param},
                         {"quantity", o.quantity},
                         {"scale", o.scale},
                         {"points", points}});
  write_text(std::filesystem::path(o.out_dir) / "index.json", index.dump(2) + "\n");
  return kOk;
}

void add_config(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON parameter file")->required();
  sub->add_option("--out", o.out, "Output file (stdout if omitted)");
  sub->add_option("--workers", o.workers, "Worker threads (0: all cores)");
}

void add_time_range(CLI::App* sub, Options& o) {
  sub->add_option("--t-start", o.t_start, "First time [s]");
  sub->add_option("--t-end", o.t_end, "Last time [s]");
}

void add_detuning(CLI::App* sub, Options& o) {
  sub->add_option("--t", o.t, "Emission time [s]");
  sub->add_option("--delta-min", o.delta_min, "Lowest detuning [rad/s] (default -4 wp)");
  sub->add_option("--delta-max", o.delta_max, "Highest detuning [rad/s] (default +4 wp)");
}

void add_rate_order(CLI::App* sub, Options& o) {
  sub->add_option("--order", o.order, "exact or first")
      ->check(CLI::IsMember({"exact", "first"}));
}

}  // namespace

ResolvabilityReport resolvability(const PhysicalParams& p, double linewidth) {
  if (!(linewidth > 0.0) || !std::isfinite(linewidth)) {
    throw std::invalid_argument("linewidth must be positive and finite");
  }
  ResolvabilityReport r;
  r.omega_p = p.omega_p;
  r.linewidth = linewidth;
  r.margin = p.omega_p / linewidth;
  r.resolvable = r.margin > 1.0;
  return r;
}

std::string resolvability_json(const ResolvabilityReport& r) {
  return json{{"omega_p", r.omega_p},
              {"linewidth", r.linewidth},
              {"resolvable", r.resolvable},
              {"margin", r.margin}}
      .dump();
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

void write_rate_csv(const RateSeries& series, std::ostream& os) {
  os << "t_s,gamma_over_a21\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    os << format_value(series.times[i]) << ',' << format_value(series.values[i]) << '\n';
  }
}

void write_spectrum_csv(const SpectrumSeries& series, std::ostream& os) {
  os << "delta_rad_per_s,p_static,p_dynamic,p_total\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << format_value(series.detunings[i]) << ',' << format_value(series.p_static[i]) << ','
       << format_value(series.p_dynamic[i]) << ',' << format_value(series.p_total[i]) << '\n';
  }
}

void write_surface_csv(std::span<const SurfaceRow> rows, std::ostream& os) {
  os << "t_s,delta_rad_per_s,p_total\n";
  for (const auto& r : rows) {
    os << format_value(r.t) << ',' << format_value(r.delta) << ',' << format_value(r.p_total)
       << '\n';
  }
}

std::string peaks_json(const PeakReport& report) {
  json arr = json::array();
  for (const auto& pk : report.peaks) {
    arr.push_back({{"offset", pk.offset},
                   {"height", pk.height},
                   {"fwhm", pk.fwhm},
                   {"class", std::string(to_string(pk.cls))}});
  }
  return arr.dump(2);
}

std::string validation_json(const std::vector<oracle::OracleReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back({{"name", r.name},
                   {"closed_form", r.closed_form},
                   {"quadrature", r.quadrature},
                   {"abs_error", r.abs_error},
                   {"rel_error", r.rel_error},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass},
                   {"nodes", r.nodes}});
  }
  return arr.dump(2);
}

void emit_spectrum(const SpectrumSeries& series, const std::filesystem::path& path) {
  auto os = open_for_write(path);
  write_spectrum_csv(series, os);
  finish_write(os, path);
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spontaneous emission near an oscillating mirror", "oscmirror"};
  app.require_subcommand(1, 1);
  Options o;

  auto* rate = app.add_subcommand("rate", "Decay rate Gamma(t)/A21 on a time grid");
  add_config(rate, o);
  add_time_range(rate, o);
  rate->add_option("--n", o.n, "Number of time points (default 1000)");
  add_rate_order(rate, o);

  auto* spectrum = app.add_subcommand("spectrum", "Emission spectrum at fixed time");
  add_config(spectrum, o);
  add_detuning(spectrum, o);
  spectrum->add_option("--n", o.n, "Number of detuning points (default 8001)");
  spectrum->add_flag("--envelope", o.envelope, "Replace the spectrum by its envelope");
  spectrum->add_option("--linewidth", o.linewidth, "Linewidth for resolvability [rad/s]");

  auto* peaks = app.add_subcommand("peaks", "Envelope peaks of the spectrum");
  add_config(peaks, o);
  add_detuning(peaks, o);
  peaks->add_option("--n", o.n, "Number of detuning points (default 8001)");
  peaks->add_option("--prominence", o.prominence, "Minimum prominence relative to the maximum");
  peaks->add_option("--linewidth", o.linewidth, "Linewidth for resolvability [rad/s]");

  auto* surface = app.add_subcommand("surface", "Spectrum over a time grid, long format");
  add_config(surface, o);
  add_time_range(surface, o);
  surface->add_option("--n", o.n, "Number of time points (default 50)");
  surface->add_option("--delta-min", o.delta_min, "Lowest detuning [rad/s]");
  surface->add_option("--delta-max", o.delta_max, "Highest detuning [rad/s]");
  surface->add_option("--n-delta", o.n_delta, "Number of detuning points (default 801)");

  auto* validate = app.add_subcommand("validate", "Run the oracle cross-checks");
  add_config(validate, o);
  validate->add_option("--t", o.t, "Emission time for spectrum checks [s] (default 1e-6)");
  validate->add_option("--nodes", o.nodes, "Base Gauss-Legendre order (default 128)");

  auto* sweep = app.add_subcommand("sweep", "Vary one parameter, one output file per point");
  add_config(sweep, o);
  sweep->add_option("--param", o.param, "omega0, omega_p, amplitude, z0 or a21")->required();
  sweep->add_option("--from", o.from, "First value")->required();
  sweep->add_option("--to", o.to, "Last value")->required();
  sweep->add_option("--steps", o.steps, "Number of points")->required();
  sweep->add_option("--scale", o.scale, "lin or geom")->check(CLI::IsMember({"lin", "geom"}));
  sweep->add_option("--quantity", o.quantity, "rate, spectrum or peaks")
      ->check(CLI::IsMember({"rate", "spectrum", "peaks"}));
  sweep->add_option("--out-dir", o.out_dir, "Directory for the per-point files")->required();
  add_time_range(sweep, o);
  add_detuning(sweep, o);
  sweep->add_option("--n", o.n, "Grid points per file");
  add_rate_order(sweep, o);
  sweep->add_flag("--envelope", o.envelope, "Envelope the spectra");
  sweep->add_option("--prominence", o.prominence, "Peak prominence threshold");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error:usage:" << e.what() << "\n";
    return kUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  try {
    Context ctx{chosen->get_name(), args, out, err, o, load_config(o.config)};
    ctx.warn_adiabatic();
    const std::string& name = ctx.command;
    if (name == "rate") return cmd_rate(ctx);
    if (name == "spectrum") return cmd_spectrum(ctx);
    if (name == "peaks") return cmd_peaks(ctx);
    if (name == "surface") return cmd_surface(ctx);
    if (name == "validate") return cmd_validate(ctx);
    return cmd_sweep(ctx);
  } catch (const ConfigError& e) {
    err << "error:config:" << (e.key().empty() ? "" : e.key() + ": ") << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error:io:" << e.what() << "\n";
    return kIo;
  } catch (const UsageError& e) {
    err << "error:usage:" << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedOrientation& e) {
    err << "error:usage:" << e.what() << "\n";
    return kUsage;
  } catch (const GridError& e) {
    err << "error:usage:" << e.what() << "\n";
    return kUsage;
  } catch (const QuadratureError& e) {
    err << "error:numeric:" << e.what() << "\n";
    return kInternal;
  } catch (const std::invalid_argument& e) {
    err << "error:usage:" << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error:internal:" << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace oscmirror::cli
