// Acceptance checks, one per invocation: `acceptance N` prints a single
// PASS/FAIL line for check N (plus indented detail) and exits nonzero on FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gaugemc/estimators.hpp"
#include "gaugemc/experiments.hpp"
#include "gaugemc/noise.hpp"
#include "gaugemc/oracle.hpp"
#include "gaugemc/samplers.hpp"

using namespace gaugemc;
namespace fs = std::filesystem;

namespace {

const std::vector<MomentKernelSpec> kKernels{kAmplitudeKernel, kNumberKernel};

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << "  " << (ok ? "ok   " : "FAIL ") << what << "\n";
  }
  void info(const std::string& what) { detail << "  info " << what << "\n"; }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void oracle_agreement(Verdict& v) {
  double worst_x = 0, worst_n = 0;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.01 * i;
    const FockMoments m = fock_moments(100.0, t, 200);
    worst_x = std::max(worst_x, std::abs(m.x_rotating - exact_X_rotating(100.0, t)));
    worst_n = std::max(worst_n, std::abs(m.n_mean - 100.0));
  }
  v.check(worst_x <= 1e-8, fmt("max |fock X - exact X| = %.3g (<= 1e-8)", worst_x));
  v.check(worst_n <= 1e-10, fmt("max |<n> - 100| = %.3g (<= 1e-10)", worst_n));
}

void martingale(Verdict& v) {
  StochasticRunConfig cfg;
  cfg.sim.total_time = 0.02;
  cfg.n_trajectories = 10000;
  cfg.n_groups = 10;
  const MomentSeries s = run_stochastic(cfg, kKernels);
  const MomentEstimate w = s.omega_mean.back();
  v.check(std::abs(w.mean - 1.0) <= 3.0 * w.error,
          fmt("<Omega>(0.02) = %.5f +- %.5f", w.mean, w.error));
}

void stochastic_short_time(Verdict& v) {
  StochasticRunConfig cfg;
  cfg.n_trajectories = 100000;
  cfg.n_groups = 10;
  cfg.seed = 1;
  const MomentSeries s = run_stochastic(cfg, kKernels);
  const std::size_t kx = s.kernel_index(kAmplitudeKernel);
  int bad = 0, checked = 0;
  double worst = 0;
  for (std::size_t t = 0; t < s.times.size(); ++t) {
    if (s.times[t] > 0.02 + 1e-12)
      break;
    const MomentEstimate& e = s.moments[kx][t];
    const double dev = std::abs(e.mean - exact_X_rotating(100.0, s.times[t]));
    worst = std::max(worst, e.error > 0 ? dev / e.error : (dev > 1e-12 ? INFINITY : 0.0));
    bad += dev > 3.0 * e.error + 1e-12;
    ++checked;
  }
  v.check(bad == 0, fmt("<X> within 3 sigma at %.0f of %.0f times with tau <= 0.02 (worst %.2f sigma)",
                        checked - bad, checked, worst));
  double lowest = INFINITY, lowest_err = 0, lowest_t = 0;
  for (std::size_t t = 0; t < s.times.size(); ++t)
    if (s.times[t] >= 0.05 - 1e-12 && s.omega_mean[t].mean < lowest) {
      lowest = s.omega_mean[t].mean;
      lowest_err = s.omega_mean[t].error;
      lowest_t = s.times[t];
    }
  v.check(lowest < 0.9, fmt("min <Omega> over tau >= 0.05 is %.4f +- %.4f at tau %.3f (< 0.9)",
                            lowest, lowest_err, lowest_t));
  v.info(fmt("final <Omega> = %.4f +- %.4f", s.omega_mean.back().mean, s.omega_mean.back().error));
  v.info(fmt("imaginary residue X %.3g, n %.3g", s.max_imag_residue[kx],
             s.max_imag_residue[s.kernel_index(kNumberKernel)]));
}

void metropolis_accuracy(Verdict& v) {
  MetropolisRunConfig cfg;
  cfg.n_chains = 20;
  cfg.samples_per_chain = 1000;
  cfg.burn_in = 1000;
  cfg.mutate_fraction = 0.1;
  const MetropolisResult r = run_metropolis(cfg, kKernels);
  const MomentEstimate& x = r.estimates[0];
  const MomentEstimate& n = r.estimates[1];
  const double want = exact_X_rotating(100.0, r.target_time);
  v.check(std::abs(n.mean - 100.0) <= 3.0, fmt("<n> = %.3f +- %.3f (within 3%% of 100)", n.mean, n.error));
  v.check(std::abs(x.mean - want) <= 3.0 * x.error,
          fmt("<X> = %.4f +- %.4f vs exact %.4f", x.mean, x.error, want));
  v.info(fmt("acceptance rate %.3f, %.0f warnings", r.acceptance_rate(),
             static_cast<double>(r.warnings.size())));
}

void branching_accuracy(Verdict& v) {
  BranchingRunConfig cfg;
  cfg.n_pop = 1000;
  cfg.n_populations = 10;
  cfg.branch_interval = 1e-3;
  const BranchingResult r = run_branching(cfg, kKernels);
  const MomentSeries& s = r.series;
  const std::size_t kx = s.kernel_index(kAmplitudeKernel);
  int good = 0, total = 0;
  for (std::size_t t = 1; t < s.times.size(); ++t) {
    const MomentEstimate& e = s.moments[kx][t];
    good += std::abs(e.mean - exact_X_rotating(100.0, s.times[t])) <= 3.0 * e.error;
    ++total;
  }
  v.check(good >= 0.9 * total, fmt("<X> within 3 sigma at %.0f of %.0f saved times", good, total));
  std::size_t in = 0, events = 0;
  for (std::size_t p = 0; p < r.sizes.size(); ++p) {
    const double n0 = static_cast<double>(r.initial_sizes[p]);
    for (std::size_t sz : r.sizes[p]) {
      in += std::abs(static_cast<double>(sz) - n0) <= 5.0 * std::sqrt(n0);
      ++events;
    }
  }
  v.check(in >= 0.99 * events,
          fmt("population size within 5 sqrt(N) at %.0f of %.0f events", in, events));
  v.info(fmt("imaginary residue X %.3g", s.max_imag_residue[kx]));
}

void clone_unbiased(Verdict& v) {
  // Stratified uniforms: the quadrature error is O(1/M) rather than O(1/sqrt M).
  const int m = 1000000;
  Rng rng(11);
  std::vector<double> u(m);
  for (int j = 0; j < m; ++j)
    u[j] = (j + rng.uniform()) / m;
  double worst = 0;
  for (int i = 0; i <= 50; ++i) {
    const double x = 0.1 * i;
    double s = 0;
    for (double y : u)
      s += static_cast<double>(clone_count(x, y));
    worst = std::max(worst, std::abs(s / m - x));
  }
  v.check(worst <= 1e-3, fmt("max |mean floor(x+u) - x| = %.3g over x = 0..5", worst));

  const std::size_t n = 50;
  std::vector<double> w(n), obs(n);
  double sw = 0, swo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(1.5 * rng.normal());
    obs[i] = rng.normal() + 0.1 * i;
    sw += w[i];
    swo += w[i] * obs[i];
  }
  const int events = 20000;
  double s1 = 0, s2 = 0;
  for (int e = 0; e < events; ++e) {
    const auto c = clone_counts(w, rng);
    double so = 0;
    for (std::size_t i = 0; i < n; ++i)
      so += c[i] * obs[i];
    s1 += so / n;
    s2 += (so / n) * (so / n);
  }
  const double mean = s1 / events;
  const double se = std::sqrt((s2 / events - mean * mean) / events);
  v.check(std::abs(mean - swo / sw) <= 4.0 * se,
          fmt("frozen population mean %.5f vs %.5f (se %.2g)", mean, swo / sw, se));
}

void tilted_gaussian(Verdict& v) {
  const double c = 0.8;
  ChainSettings s;
  s.channels = 1;
  s.steps = 1;
  s.n_chains = 10;
  s.samples_per_chain = 10000;
  s.burn_in = 1000;
  s.mutate_fraction = 1.0;
  s.seed = 3;
  const PathEvaluator eval = [c](const NoisePath& p) {
    const double w = p(0, 0);
    return PathEvaluation{std::exp(c * w), {2.0 * w}};
  };
  const MetropolisResult r = run_chains(s, eval, std::vector<MomentKernelSpec>{});
  const MomentEstimate& e = r.estimates[0];
  v.check(std::abs(e.mean - c) <= 4.0 * e.error,
          fmt("chain mean of w = %.4f +- %.4f (target %.1f)", e.mean, e.error, c));
}

void spectrum_properties(Verdict& v) {
  Rng rng(8);
  double rt = 0, pars = 0;
  for (std::size_t n : {1ul, 2ul, 7ul, 64ul, 1000ul, 1001ul}) {
    const NoisePath p = sample(4, n, rng);
    const NoisePath q = from_spectrum(to_spectrum(p));
    for (std::size_t i = 0; i < p.values().size(); ++i)
      rt = std::max(rt, std::abs(q.values()[i] - p.values()[i]));
    double time = 0, freq = 0;
    for (double x : p.row(0))
      time += x * x;
    for (const auto& k : full_spectrum(to_spectrum(p), 0))
      freq += std::norm(k);
    pars = std::max(pars, std::abs(freq - n * time) / (n * time));
  }
  v.check(rt <= 1e-12, fmt("round trip max error %.3g", rt));
  v.check(pars <= 1e-9, fmt("Parseval relative error %.3g", pars));

  bool exact = true;
  for (double f : {0.05, 0.1, 0.5}) {
    const SpectrumPath before = to_spectrum(sample(4, 1000, rng));
    SpectrumPath after = before;
    mutate_spectrum(after, f, rng);
    for (std::size_t ch = 0; ch < 4; ++ch) {
      std::size_t same = 0;
      for (std::size_t b = 0; b < before.stored_bins(); ++b)
        same += before.row(ch)[b] == after.row(ch)[b];
      exact = exact && same == before.stored_bins() - bins_per_mutation(1000, f);
    }
  }
  v.check(exact, "unselected bins unchanged bit for bit");

  const std::size_t n = 1000;
  const int draws = 10000;
  double dc = 0, nyq = 0, re = 0, im = 0;
  for (int i = 0; i < draws; ++i) {
    const auto a = draw_bin(0, n, rng), b = draw_bin(n / 2, n, rng), c = draw_bin(137, n, rng);
    dc += std::norm(a);
    nyq += std::norm(b);
    re += c.real() * c.real();
    im += c.imag() * c.imag();
  }
  const double full = std::sqrt(double(n)), half = std::sqrt(n / 2.0);
  const double worst = std::max({std::abs(std::sqrt(dc / draws) / full - 1),
                                 std::abs(std::sqrt(nyq / draws) / full - 1),
                                 std::abs(std::sqrt(re / draws) / half - 1),
                                 std::abs(std::sqrt(im / draws) / half - 1)});
  v.check(worst <= 0.05, fmt("regenerated bin scales within %.2f%% of prior", 100 * worst));
}

void noise_trend(Verdict& v) {
  SimConfig sim;
  sim.total_time = 0.05;
  const Table t = noise_scan(sim, 100, {3}, 1, 0);
  const std::size_t bins = t.rows.size();
  const std::size_t decile = std::max<std::size_t>(1, bins / 10);
  double lo = 0, hi = 0;
  for (std::size_t i = 0; i < decile; ++i) {
    lo += t.rows[i][2];
    hi += t.rows[bins - 1 - i][2];
  }
  lo /= decile;
  hi /= decile;
  v.check(lo > hi, fmt("mean sigma lowest decile %.4g > highest decile %.4g (%.0f bins each)", lo,
                       hi, decile));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void cli_determinism(Verdict& v) {
  const fs::path dir = fs::temp_directory_path() / ("gaugemc_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const struct {
    const char* cmd;
    const char* args;
  } runs[] = {
      {"stochastic", "--n-trajectories 2000 --n-groups 10 --total-time 0.02"},
      {"branching", "--n-pop 200 --n-populations 10 --total-time 0.02"},
      {"metropolis", "--n-chains 8 --samples-per-chain 50 --burn-in 20 --total-time 0.01 --n-targets 2"},
      {"weight-spread", "--count 3"},
      {"noise-scan", "--trials 5 --total-time 0.01 --all-channels 1"},
      {"oracle", ""},
  };
  const auto start = std::chrono::steady_clock::now();
  for (const auto& r : runs) {
    std::string csv[2];
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
      const char* workers = k == 0 ? "1" : "8";
      const fs::path out = dir / (std::string(r.cmd) + "_w" + workers);
      const std::string line = std::string(GAUGEMC_CLI) + " " + r.cmd + " " + r.args +
                               " --seed 4 --workers " + workers + " --outdir " + out.string() +
                               " >/dev/null";
      const int status = std::system(line.c_str());
      ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0;
      csv[k] = slurp(out / (std::string(r.cmd) + ".csv"));
    }
    v.check(ran && !csv[0].empty() && csv[0] == csv[1],
            std::string(r.cmd) + ": workers 1 and 8 give identical CSV");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.check(secs < 300, fmt("total %.1f s", secs));
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  static const struct {
    const char* name;
    void (*run)(Verdict&);
  } checks[] = {
      {"oracle cross-validation", oracle_agreement},
      {"weight normalisation", martingale},
      {"stochastic short-time accuracy and late-time weight decay", stochastic_short_time},
      {"Metropolis accuracy", metropolis_accuracy},
      {"branching accuracy", branching_accuracy},
      {"clone-count unbiasedness", clone_unbiased},
      {"Metropolis tilted-Gaussian target", tilted_gaussian},
      {"spectrum properties", spectrum_properties},
      {"noise sensitivity trend", noise_trend},
      {"CLI determinism across worker counts", cli_determinism},
  };
  const int n = argc > 1 ? std::atoi(argv[1]) : 0;
  if (n < 1 || n > 10) {
    std::fprintf(stderr, "usage: acceptance N   (N = 1..10)\n");
    return 2;
  }
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  try {
    checks[n - 1].run(v);
  } catch (const std::exception& e) {
    v.check(false, std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s criterion %d: %s (%.1f s)\n%s", v.pass ? "PASS" : "FAIL", n, checks[n - 1].name,
              secs, v.detail.str().c_str());
  return v.pass ? 0 : 1;
}
