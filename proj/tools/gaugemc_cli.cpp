// gaugemc command-line driver. Uses only the public C API.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaugemc/gaugemc.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KeyInfo {
  const char* key;
  const char* fallback;  // nullptr: resolved from another key
  const char* help;
};

// Every recognised configuration key. Flags mirror these with '-' for '_'.
const std::vector<KeyInfo> kKeys = {
    {"nbar", "100", "mean boson number of the initial coherent state"},
    {"total_time", "0.1", "final time (noise-scan defaults to 0.05)"},
    {"dt", "1e-4", "integration step"},
    {"gauge", "real", "real | complex | none"},
    {"diffusion", "2", "diffusion gauge A"},
    {"lambda", "0.5", "extra-noise amplitude"},
    {"frame_frequency", nullptr, "rotating-frame frequency (default: nbar)"},
    {"save_stride", "10", "record every N steps"},
    {"seed", "1", "master seed"},
    {"workers", "0", "worker threads, 0 = all cores"},
    {"n_trajectories", "1000000", "stochastic: trajectories"},
    {"n_groups", "100", "stochastic: groups for error bars"},
    {"n_chains", "100", "metropolis: chains"},
    {"samples_per_chain", "10000", "metropolis: samples kept per chain"},
    {"burn_in", "10000", "metropolis: discarded proposals"},
    {"mutate_fraction", "0.1", "metropolis: fraction of bins redrawn per proposal"},
    {"n_targets", "20", "metropolis: target times, evenly spaced up to total_time"},
    {"n_pop", "10000", "branching: initial members per population"},
    {"n_populations", "100", "branching: independent populations"},
    {"branch_interval", "1e-3", "branching: time between branching events"},
    {"count", "3", "weight-spread: trajectories"},
    {"trials", "1000", "noise-scan: redraws per bin"},
    {"all_channels", "0", "noise-scan: scan every noise channel"},
    {"cutoff", "0", "oracle: Fock cutoff, 0 = automatic"},
};

bool known_key(const std::string& key) {
  for (const auto& k : kKeys)
    if (key == k.key)
      return true;
  return false;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!known_key(key))
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

class Params {
 public:
  explicit Params(std::map<std::string, std::string> values) : v_(std::move(values)) {}

  const std::string& str(const std::string& key) const {
    auto it = v_.find(key);
    if (it == v_.end())
      throw UsageError("missing value for '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const {
    const std::string& s = str(key);
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0')
      throw UsageError("'" + key + "' expects a number, got '" + s + "'");
    return x;
  }

  std::uint64_t count(const std::string& key) const {
    const std::string& s = str(key);
    if (s.empty() || s[0] == '-')
      throw UsageError("'" + key + "' expects a non-negative integer, got '" + s + "'");
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (*end != '\0' || x != static_cast<double>(static_cast<std::uint64_t>(x)))
      throw UsageError("'" + key + "' expects a non-negative integer, got '" + s + "'");
    return static_cast<std::uint64_t>(x);
  }

  const std::map<std::string, std::string>& all() const { return v_; }

 private:
  std::map<std::string, std::string> v_;
};

void check(gmc_status st) {
  if (st != GMC_OK)
    throw RuntimeError(std::string(gmc_status_string(st)) + ": " + gmc_last_error());
}

gmc_sim_config sim_config(const Params& p) {
  gmc_sim_config c;
  gmc_sim_config_default(&c);
  c.nbar = p.real("nbar");
  c.total_time = p.real("total_time");
  c.dt = p.real("dt");
  const std::string& g = p.str("gauge");
  if (g == "real")
    c.gauge_kind = GMC_GAUGE_REAL;
  else if (g == "complex")
    c.gauge_kind = GMC_GAUGE_COMPLEX;
  else if (g == "none")
    c.gauge_kind = GMC_GAUGE_NONE;
  else
    throw UsageError("gauge must be real, complex or none, got '" + g + "'");
  c.diffusion = p.real("diffusion");
  c.lambda = p.real("lambda");
  c.frame_frequency = p.real("frame_frequency");
  c.save_stride = p.count("save_stride");
  return c;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_)
      throw RuntimeError("cannot write '" + path.string() + "'");
  }
  void header(const std::vector<std::string>& cols) { line(cols); }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double x : values)
      cells.push_back(fmt(x));
    line(cells);
  }
  void close() {
    out_.close();
    if (!out_)
      throw RuntimeError("error writing '" + path_.string() + "'");
  }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  fs::path path_;
  std::ofstream out_;
};

struct Output {
  fs::path dir;
  std::vector<std::string> notes;  // extra manifest lines
};

template <class T, void (*Destroy)(T*)>
struct Owned {
  T* ptr = nullptr;
  ~Owned() { Destroy(ptr); }
};

void write_series(const gmc_series* s, const fs::path& path) {
  Csv csv(path);
  csv.header({"tau", "mean_X", "err_X", "mean_n", "err_n", "mean_omega", "err_omega"});
  for (std::size_t i = 0; i < gmc_series_length(s); ++i) {
    gmc_series_row r;
    check(gmc_series_get_row(s, i, &r));
    csv.row({r.tau, r.mean_x, r.err_x, r.mean_n, r.err_n, r.mean_omega, r.err_omega});
  }
  csv.close();
}

void write_table(const gmc_table* t, const fs::path& path) {
  Csv csv(path);
  std::vector<std::string> cols;
  for (std::size_t c = 0; c < gmc_table_cols(t); ++c)
    cols.push_back(gmc_table_column_name(t, c));
  csv.header(cols);
  std::vector<double> row(cols.size());
  for (std::size_t r = 0; r < gmc_table_rows(t); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c)
      row[c] = gmc_table_value(t, r, c);
    csv.row(row);
  }
  csv.close();
}

void residue_notes(const gmc_series* s, Output& out) {
  double rx = 0, rn = 0;
  check(gmc_series_imag_residue(s, &rx, &rn));
  out.notes.push_back("imag_residue_X = " + fmt(rx));
  out.notes.push_back("imag_residue_n = " + fmt(rn));
}

void cmd_stochastic(const Params& p, Output& out) {
  const gmc_sim_config sim = sim_config(p);
  Owned<gmc_series, gmc_series_destroy> s;
  check(gmc_run_stochastic(&sim, p.count("n_trajectories"), p.count("n_groups"),
                           p.count("seed"), static_cast<std::uint32_t>(p.count("workers")),
                           &s.ptr));
  write_series(s.ptr, out.dir / "stochastic.csv");
  residue_notes(s.ptr, out);
}

void cmd_branching(const Params& p, Output& out) {
  const gmc_sim_config sim = sim_config(p);
  Owned<gmc_series, gmc_series_destroy> s;
  check(gmc_run_branching(&sim, p.count("n_pop"), p.count("n_populations"),
                          p.real("branch_interval"), p.count("seed"),
                          static_cast<std::uint32_t>(p.count("workers")), &s.ptr));
  write_series(s.ptr, out.dir / "branching.csv");
  residue_notes(s.ptr, out);

  std::uint64_t lo = UINT64_MAX, hi = 0;
  for (std::size_t pop = 0; pop < gmc_series_population_count(s.ptr); ++pop)
    for (std::size_t e = 0; e < gmc_series_event_count(s.ptr); ++e) {
      std::uint64_t n = 0;
      check(gmc_series_population_size(s.ptr, pop, e, &n));
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
  if (hi > 0) {
    out.notes.push_back("population_min = " + std::to_string(lo));
    out.notes.push_back("population_max = " + std::to_string(hi));
  }
}

// splitmix64 finaliser; gives each target time its own stream.
std::uint64_t target_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void cmd_metropolis(const Params& p, Output& out) {
  gmc_sim_config sim = sim_config(p);
  const std::uint64_t targets = p.count("n_targets");
  if (targets == 0)
    throw UsageError("n_targets must be at least 1");
  gmc_metropolis_config mc;
  gmc_metropolis_config_default(&mc);
  mc.n_chains = p.count("n_chains");
  mc.samples_per_chain = p.count("samples_per_chain");
  mc.burn_in = p.count("burn_in");
  mc.mutate_fraction = p.real("mutate_fraction");
  mc.workers = static_cast<std::uint32_t>(p.count("workers"));

  // Round targets onto the step grid so each is an exact multiple of dt.
  const double spacing = sim.total_time / static_cast<double>(targets);
  Csv csv(out.dir / "metropolis.csv");
  csv.header({"tau", "mean_X", "err_X", "mean_n", "err_n", "acceptance_rate"});
  std::ostringstream rates;
  for (std::uint64_t k = 1; k <= targets; ++k) {
    const double steps = std::round(spacing * static_cast<double>(k) / sim.dt);
    sim.total_time = steps * sim.dt;
    mc.seed = target_seed(p.count("seed"), k);
    Owned<gmc_metropolis_result, gmc_metropolis_destroy> r;
    check(gmc_run_metropolis(&sim, &mc, &r.ptr));
    gmc_metropolis_row row;
    check(gmc_metropolis_get_row(r.ptr, &row));
    csv.row({row.tau, row.mean_x, row.err_x, row.mean_n, row.err_n, row.acceptance_rate});
    for (std::size_t w = 0; w < gmc_metropolis_warning_count(r.ptr); ++w)
      std::cerr << "warning (tau = " << fmt(row.tau) << "): "
                << gmc_metropolis_warning(r.ptr, w) << '\n';
    rates << (k > 1 ? " " : "") << fmt(row.acceptance_rate);
  }
  csv.close();
  out.notes.push_back("acceptance_rates = " + rates.str());
}

void cmd_weight_spread(const Params& p, Output& out) {
  const gmc_sim_config sim = sim_config(p);
  Owned<gmc_table, gmc_table_destroy> t;
  check(gmc_weight_spread(&sim, p.count("count"), p.count("seed"), &t.ptr));
  write_table(t.ptr, out.dir / "weight-spread.csv");
}

void cmd_noise_scan(const Params& p, Output& out) {
  const gmc_sim_config sim = sim_config(p);
  Owned<gmc_table, gmc_table_destroy> t;
  check(gmc_noise_scan(&sim, p.count("trials"), p.count("all_channels") != 0, p.count("seed"),
                       static_cast<std::uint32_t>(p.count("workers")), &t.ptr));
  write_table(t.ptr, out.dir / "noise-scan.csv");
}

void cmd_oracle(const Params& p, Output& out) {
  const gmc_sim_config sim = sim_config(p);
  Owned<gmc_table, gmc_table_destroy> t;
  check(gmc_oracle_table(&sim, p.count("cutoff"), &t.ptr));
  write_table(t.ptr, out.dir / "oracle.csv");
}

void write_manifest(const std::string& command, const Params& p, const Output& out,
                    double seconds) {
  std::ofstream m(out.dir / "manifest.txt", std::ios::binary);
  if (!m)
    throw RuntimeError("cannot write manifest");
  m << "# gaugemc " << gmc_version() << '\n';
  m << "# command = " << command << '\n';
  m << "# wall_seconds = " << fmt(seconds) << '\n';
  for (const auto& n : out.notes)
    m << "# " << n << '\n';
  m << "# rerun: gaugemc " << command << " --config manifest.txt\n";
  for (const auto& [k, v] : p.all())
    m << k << " = " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauge-P Monte Carlo for the Kerr anharmonic oscillator"};
  app.set_version_flag("--version", std::string(gmc_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir = ".";
  std::map<std::string, std::string> overrides;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--outdir", outdir, "output directory")->capture_default_str();
  for (const auto& k : kKeys) {
    std::string flag = std::string("--") + k.key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    const std::string key = k.key;
    app.add_option_function<std::string>(
           flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, k.help)
        ->type_name("VALUE");
  }

  const std::vector<std::pair<std::string, void (*)(const Params&, Output&)>> commands = {
      {"stochastic", cmd_stochastic},   {"metropolis", cmd_metropolis},
      {"branching", cmd_branching},     {"weight-spread", cmd_weight_spread},
      {"noise-scan", cmd_noise_scan},   {"oracle", cmd_oracle},
  };
  const std::map<std::string, std::string> descriptions = {
      {"stochastic", "plain weighted average over independent trajectories"},
      {"metropolis", "Metropolis-Hastings over noise paths at target times"},
      {"branching", "branching populations with periodic weight resets"},
      {"weight-spread", "per-step weights of a few trajectories"},
      {"noise-scan", "final-weight sensitivity to each spectral noise bin"},
      {"oracle", "exact reference curves"},
  };
  for (const auto& c : commands)
    app.add_subcommand(c.first, descriptions.at(c.first))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  std::string command;
  void (*run)(const Params&, Output&) = nullptr;
  for (const auto& c : commands)
    if (app.got_subcommand(c.first)) {
      command = c.first;
      run = c.second;
    }

  try {
    std::map<std::string, std::string> values;
    for (const auto& k : kKeys)
      if (k.fallback)
        values[k.key] = k.fallback;
    if (command == "noise-scan")
      values["total_time"] = "0.05";
    if (!config_path.empty())
      for (auto& [k, v] : read_config(config_path))
        values[k] = v;
    for (auto& [k, v] : overrides)
      values[k] = v;
    if (!values.count("frame_frequency"))
      values["frame_frequency"] = values["nbar"];
    const Params params(values);
    sim_config(params);  // reject malformed values before any work

    Output out{fs::path(outdir), {}};
    std::error_code ec;
    fs::create_directories(out.dir, ec);
    if (ec)
      throw RuntimeError("cannot create '" + outdir + "': " + ec.message());

    const auto t0 = std::chrono::steady_clock::now();
    run(params, out);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(command, params, out, secs);
  } catch (const UsageError& e) {
    std::cerr << "gaugemc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "gaugemc: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
