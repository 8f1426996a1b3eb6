#include "rydress/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "rydress/errors.hpp"

namespace rydress {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw DomainError("expected a number, got '" + s + "'");
  return v;
}

std::int64_t to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw DomainError("expected an integer, got '" + s + "'");
  return static_cast<std::int64_t>(v);
}

bool to_bool(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
  if (l == "false" || l == "no" || l == "off" || l == "0") return false;
  throw DomainError("expected true/false, got '" + s + "'");
}

std::vector<double> call_args(const std::string& text, const std::string& name) {
  const std::string inner = trim(text.substr(name.size() + 1, text.size() - name.size() - 2));
  std::vector<double> args;
  for (const auto& a : split(inner, ',')) args.push_back(to_double(a));
  return args;
}

// "4.4:4.0, 4.3:1.3" -> drives
std::vector<LaserDrive> parse_drives(const std::string& text) {
  std::vector<LaserDrive> drives;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw DomainError("expected rabi:detuning pairs, got '" + item + "'");
    drives.push_back({to_double(parts[0]), to_double(parts[1])});
  }
  if (drives.empty()) throw DomainError("at least one drive is required");
  return drives;
}

}  // namespace

IniTable parse_ini(std::string_view text) {
  IniTable table;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (table[section].count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + (section.empty() ? key : section + "." + key) +
                        ": duplicate key");
    }
    table[section][key] = trim(line.substr(eq + 1));
  }
  return table;
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return {};
  if (t.rfind("linspace(", 0) == 0 && t.back() == ')') {
    const auto a = call_args(t, "linspace");
    if (a.size() != 3 || a[2] < 1 || a[2] != std::floor(a[2])) {
      throw DomainError("linspace(start, stop, count) needs an integer count >= 1");
    }
    const auto n = static_cast<std::size_t>(a[2]);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? a[0] : a[0] + (a[1] - a[0]) * i / (n - 1);
    return g;
  }
  if (t.rfind("range(", 0) == 0 && t.back() == ')') {
    const auto a = call_args(t, "range");
    if (a.size() != 3 || !(a[2] > 0.0) || a[1] < a[0]) throw DomainError("range(start, stop, step) needs step > 0");
    const auto n = static_cast<std::size_t>(std::floor((a[1] - a[0]) / a[2] + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = a[0] + a[2] * i;
    return g;
  }
  std::vector<double> g;
  for (const auto& item : split(t, ',')) g.push_back(to_double(item));
  return g;
}

std::uint64_t ExperimentConfig::required_seed() const {
  if (!seed) throw ConfigError("run.seed: a seed is required for stochastic runs");
  return *seed;
}

double ExperimentConfig::resolved_u_dd() const {
  if (u_dd) return *u_dd;
  if (std::holds_alternative<PerfectBlockade>(potential)) {
    throw ConfigError("potential.model: perfect_blockade has no finite shift; set potential.u_dd for dynamics");
  }
  return u_dd_mhz(potential, separation);
}

ExperimentConfig load_config(std::string_view text) {
  const IniTable table = parse_ini(text);
  ExperimentConfig c;

  using Setter = std::function<void(const std::string&)>;
  std::string model = "van_der_waals";
  VanDerWaals vdw;
  ForsterTwoChannel forster;
  std::string target = "psi_plus";
  std::string method = "global_half_pi";

  const std::map<std::string, std::map<std::string, Setter>> setters = {
      {"run",
       {{"seed", [&](const std::string& v) {
          const auto s = to_int(v);
          if (s < 0) throw DomainError("seed must be >= 0");
          c.seed = static_cast<std::uint64_t>(s);
        }},
        {"shots", [&](const std::string& v) { c.shots = static_cast<int>(to_int(v)); }},
        {"strict", [&](const std::string& v) { c.strict = to_bool(v); }}}},
      {"drive",
       {{"rabi_freq", [&](const std::string& v) { c.drive.rabi_freq = to_double(v); }},
        {"detuning", [&](const std::string& v) { c.drive.detuning = to_double(v); }},
        {"wavelength", [&](const std::string& v) { c.drive.wavelength = to_double(v); }}}},
      {"potential",
       {{"model", [&](const std::string& v) { model = v; }},
        {"c6", [&](const std::string& v) { vdw.c6 = to_double(v); }},
        {"c3", [&](const std::string& v) { forster.c3 = to_double(v); }},
        {"forster_defect", [&](const std::string& v) { forster.forster_defect = to_double(v); }},
        {"separation", [&](const std::string& v) { c.separation = to_double(v); }},
        {"u_dd", [&](const std::string& v) { c.u_dd = to_double(v); }}}},
      {"microwave",
       {{"rabi_freq", [&](const std::string& v) { c.mw_rabi = to_double(v); }},
        {"pulse_time", [&](const std::string& v) { c.pulse_time = to_double(v); }}}},
      {"noise",
       {{"decay_rate", [&](const std::string& v) { c.decay_rate = to_double(v); }},
        {"branching_to_zero", [&](const std::string& v) { c.branching.to_zero = to_double(v); }},
        {"branching_to_one", [&](const std::string& v) { c.branching.to_one = to_double(v); }},
        {"temperature", [&](const std::string& v) { c.temperature = to_double(v); }},
        {"pump_efficiency", [&](const std::string& v) { c.pump_efficiency = to_double(v); }},
        {"rydberg_loss_fraction", [&](const std::string& v) { c.detection.rydberg_loss_fraction = to_double(v); }},
        {"rydberg_bright_probability",
         [&](const std::string& v) { c.detection.rydberg_bright_probability = to_double(v); }}}},
      {"jcurve",
       {{"drives", [&](const std::string& v) { c.jcurve_drives = parse_drives(v); }},
        {"r_grid", [&](const std::string& v) { c.r_grid = parse_grid(v); }}}},
      {"scan", {{"grid", [&](const std::string& v) { c.scan_grid = parse_grid(v); }}}},
      {"rabi", {{"times", [&](const std::string& v) { c.rabi_times = parse_grid(v); }}}},
      {"bell",
       {{"target", [&](const std::string& v) { target = v; }},
        {"method", [&](const std::string& v) { method = v; }},
        {"phase_points", [&](const std::string& v) { c.phase_points = static_cast<int>(to_int(v)); }},
        {"inject_mixture", [&](const std::string& v) { c.inject_mixture = to_bool(v); }}}},
      {"lifetime",
       {{"rabi_freq", [&](const std::string& v) { c.lifetime_rabi = to_double(v); }},
        {"delays", [&](const std::string& v) { c.lifetime_delays = parse_grid(v); }}}},
      {"recapture",
       {{"release_times", [&](const std::string& v) { c.release_times = parse_grid(v); }},
        {"samples", [&](const std::string& v) {
           const auto n = to_int(v);
           if (n < 0) throw DomainError("samples must be >= 0");
           c.recapture_samples = static_cast<std::uint64_t>(n);
         }},
        {"waist", [&](const std::string& v) { c.trap.waist = to_double(v); }},
        {"depth", [&](const std::string& v) { c.trap.depth = to_double(v); }},
        {"temperature", [&](const std::string& v) { c.trap.temperature = to_double(v); }},
        {"recapture_window", [&](const std::string& v) { c.trap.recapture_window = to_double(v); }},
        {"wavelength", [&](const std::string& v) { c.trap.wavelength = to_double(v); }}}},
  };

  for (const auto& [section, entries] : table) {
    const auto s = setters.find(section);
    if (s == setters.end()) {
      throw ConfigError(section.empty() ? "keys must appear inside a [section]" : section + ": unknown section");
    }
    for (const auto& [key, value] : entries) {
      const auto k = s->second.find(key);
      if (k == s->second.end()) throw ConfigError(section + "." + key + ": unknown key");
      try {
        k->second(value);
      } catch (const DomainError& e) {
        throw ConfigError(section + "." + key + ": " + e.what());
      }
    }
  }

  auto check = [](bool ok, const std::string& path, const std::string& msg) {
    if (!ok) throw ConfigError(path + ": " + msg);
  };
  auto wrap = [](const std::string& path, const auto& fn) {
    try {
      fn();
    } catch (const DomainError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  };

  if (model == "van_der_waals") {
    c.potential = vdw;
  } else if (model == "forster") {
    c.potential = forster;
  } else if (model == "perfect_blockade") {
    c.potential = PerfectBlockade{};
  } else {
    throw ConfigError("potential.model: expected van_der_waals, forster or perfect_blockade, got '" + model + "'");
  }
  wrap("potential", [&] { validate(c.potential); });
  check(c.separation > 0.0, "potential.separation", "must be > 0");

  if (target == "psi_plus") {
    c.bell_target = BellState::psi_plus;
  } else if (target == "phi_plus") {
    c.bell_target = BellState::phi_plus;
  } else {
    throw ConfigError("bell.target: expected psi_plus or phi_plus, got '" + target + "'");
  }
  if (method == "global_half_pi") {
    c.phi_method = PhiMethod::global_half_pi;
  } else if (method == "two_photon") {
    c.phi_method = PhiMethod::two_photon;
  } else {
    throw ConfigError("bell.method: expected global_half_pi or two_photon, got '" + method + "'");
  }

  wrap("drive", [&] { c.drive.validate(); });
  for (const auto& d : c.jcurve_drives) wrap("jcurve.drives", [&] { d.validate(); });
  check(c.shots >= 1, "run.shots", "must be >= 1");
  check(!c.mw_rabi || *c.mw_rabi >= 0.0, "microwave.rabi_freq", "must be >= 0");
  check(!c.pulse_time || *c.pulse_time > 0.0, "microwave.pulse_time", "must be > 0");
  check(c.decay_rate >= 0.0, "noise.decay_rate", "must be >= 0");
  check(c.branching.to_zero >= 0.0 && c.branching.to_one >= 0.0 && c.branching.to_zero + c.branching.to_one <= 1.0,
        "noise.branching_to_zero", "branching fractions must be >= 0 and sum to <= 1");
  check(c.temperature >= 0.0, "noise.temperature", "must be >= 0");
  check(c.pump_efficiency >= 0.0 && c.pump_efficiency <= 1.0, "noise.pump_efficiency", "must lie in [0, 1]");
  wrap("noise", [&] { c.detection.validate(); });
  check(c.phase_points >= 3, "bell.phase_points", "must be >= 3");
  check(c.lifetime_rabi > 0.0, "lifetime.rabi_freq", "must be > 0");
  for (double r : c.r_grid) check(r > 0.0, "jcurve.r_grid", "distances must be > 0");
  check(std::is_sorted(c.scan_grid.begin(), c.scan_grid.end()), "scan.grid", "must be sorted");
  for (double t : c.rabi_times) check(t >= 0.0, "rabi.times", "times must be >= 0");
  for (double t : c.lifetime_delays) check(t >= 0.0, "lifetime.delays", "delays must be >= 0");
  for (double t : c.release_times) check(t >= 0.0, "recapture.release_times", "times must be >= 0");
  wrap("recapture", [&] { c.trap.validate(); });
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str());
}

}  // namespace rydress
