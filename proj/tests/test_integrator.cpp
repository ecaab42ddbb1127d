#include <gtest/gtest.h>

#include <cmath>

#include "gaugemc/error.hpp"
#include "gaugemc/estimators.hpp"
#include "gaugemc/integrator.hpp"
#include "gaugemc/noise.hpp"
#include "gaugemc/rng.hpp"

using namespace gaugemc;

namespace {

SimConfig config(double total_time) {
  SimConfig c;
  c.total_time = total_time;
  return c;
}

bool same_state(const PhaseState& a, const PhaseState& b) {
  return a.theta == b.theta && a.phi == b.phi && a.omega_log == b.omega_log;
}

}  // namespace

TEST(Step, ZeroNoiseOnlyAdvancesPhase) {
  const SimConfig c;
  const PhaseState s0 = initial_state(100.0);
  for (double dt : {1e-5, 1e-4, 3e-3}) {
    const double zeros[4] = {0, 0, 0, 0};
    const PhaseState s1 = step(s0, zeros, dt, c.gauge);
    EXPECT_EQ(s1.theta, s0.theta);
    EXPECT_EQ(s1.omega_log, s0.omega_log);
    EXPECT_NEAR(s1.phi.real(), 0.5 * dt, 1e-9 * dt);
    EXPECT_EQ(s1.phi.imag(), 0.0);
  }
}

TEST(Step, UnitKickOnFirstChannel) {
  const SimConfig c;
  const double xi[4] = {1, 0, 0, 0};
  const PhaseState s1 = step(initial_state(100.0), xi, 1e-4, c.gauge);
  const double gain = s1.theta.real() - std::log(10.0);
  EXPECT_NEAR(gain, 6.767e-4, 1e-7);
  EXPECT_NEAR(gain, 0.5 * std::exp(-2.0) * 1e-2, 1e-15);
  EXPECT_EQ(s1.theta.imag(), 0.0);
}

TEST(Step, NoiseFreeFlowHalfSteps) {
  // theta is constant without noise, so the drift is constant and Heun exact
  const SimConfig c;
  const double zeros[4] = {0, 0, 0, 0};
  const PhaseState s0{cplx(std::log(10.0), 0.01), cplx(0.2, 0.0), cplx(0.0)};
  const double dt = 1e-3;
  const PhaseState full = step(s0, zeros, dt, c.gauge);
  const PhaseState half = step(step(s0, zeros, dt / 2, c.gauge), zeros, dt / 2, c.gauge);
  EXPECT_NEAR(std::abs(full.phi - half.phi), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(full.omega_log - half.omega_log), 0.0, 1e-12);
}

TEST(Step, ShortIncrementsRejected) {
  const SimConfig c;
  const double xi[2] = {0, 0};
  try {
    step(initial_state(100.0), std::span<const double>(xi, 2), 1e-4, c.gauge);
    FAIL() << "expected a shape error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Shape);
  }
}

TEST(Evolve, ZeroPathKeepsWeight) {
  const SimConfig c = config(0.1);
  const Trajectory t = evolve(NoisePath(4, c.steps()), c);
  EXPECT_EQ(t.final_weight, 1.0);
  EXPECT_EQ(t.states.back().theta, initial_state(100.0).theta);
  EXPECT_EQ(final_weight(NoisePath(4, c.steps()), c), 1.0);
}

TEST(Evolve, TimeGrid) {
  const SimConfig c = config(0.1);
  Rng rng(1);
  const Trajectory t = evolve(sample(4, c.steps(), rng), c);
  ASSERT_EQ(t.times.size(), 101u);
  ASSERT_EQ(t.states.size(), t.times.size());
  EXPECT_EQ(t.times.front(), 0.0);
  EXPECT_EQ(t.times.back(), 0.1);
  for (std::size_t i = 1; i < t.times.size(); ++i)
    EXPECT_GT(t.times[i], t.times[i - 1]);
  EXPECT_GT(t.final_weight, 0.0);
}

TEST(Evolve, SavedStepsIncludeFinalStep) {
  SimConfig c = config(0.0025);
  EXPECT_EQ(c.steps(), 25u);
  EXPECT_EQ(saved_steps(c), (std::vector<std::size_t>{0, 10, 20, 25}));
  const auto times = saved_times(c);
  EXPECT_EQ(times.back(), 0.0025);
}

TEST(Evolve, Deterministic) {
  const SimConfig c = config(0.05);
  Rng rng(2);
  const NoisePath p = sample(4, c.steps(), rng);
  const Trajectory a = evolve(p, c);
  const Trajectory b = evolve(p, c);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i)
    EXPECT_TRUE(same_state(a.states[i], b.states[i]));
  EXPECT_EQ(a.final_weight, b.final_weight);
}

TEST(Evolve, FinalWeightMatchesEvolveExactly) {
  const SimConfig c = config(0.05);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const NoisePath p = sample(4, c.steps(), rng);
    const Trajectory t = evolve(p, c);
    const FinalState f = evolve_final(p, c);
    EXPECT_EQ(final_weight(p, c), t.final_weight);
    EXPECT_EQ(f.weight, t.final_weight);
    EXPECT_TRUE(same_state(f.state, t.states.back()));
    EXPECT_GT(f.weight, 0.0);
  }
}

TEST(Evolve, MatchesRepeatedStep) {
  SimConfig c = config(0.01);
  c.save_stride = 1;
  Rng rng(4);
  const NoisePath p = sample(4, c.steps(), rng);
  const Trajectory t = evolve(p, c);
  PhaseState s = initial_state(c.nbar);
  for (std::size_t k = 0; k < c.steps(); ++k) {
    const double xi[4] = {p(0, k), p(1, k), p(2, k), p(3, k)};
    s = step(s, xi, c.dt, c.gauge);
    const PhaseState& e = t.states[k + 1];
    ASSERT_NEAR(std::abs(s.theta - e.theta), 0.0, 1e-12);
    ASSERT_NEAR(std::abs(s.phi - e.phi), 0.0, 1e-10);
    ASSERT_NEAR(std::abs(s.omega_log - e.omega_log), 0.0, 1e-12);
  }
}

TEST(Evolve, StepperMatchesEvolve) {
  const SimConfig c = config(0.01);
  Rng rng(5);
  const NoisePath p = sample(4, c.steps(), rng);
  Stepper st(initial_state(c.nbar), c);
  for (std::size_t k = 0; k < c.steps(); ++k)
    st.advance(p.values().data() + k, c.steps());
  EXPECT_EQ(st.steps_taken(), c.steps());
  EXPECT_TRUE(same_state(st.state(), evolve_final(p, c).state));
}

TEST(Evolve, ShapeMismatch) {
  const SimConfig c = config(0.01);
  for (const NoisePath& bad : {NoisePath(3, c.steps()), NoisePath(4, c.steps() + 1)}) {
    try {
      evolve(bad, c);
      FAIL() << "expected a shape error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Shape);
    }
  }
}

TEST(SimConfig, Validation) {
  auto code = [](SimConfig c) {
    try {
      c.validate();
      c.steps();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode{0};
  };
  SimConfig c;
  EXPECT_EQ(code(c), ErrorCode{0});
  c = SimConfig{};
  c.dt = 3e-4;
  EXPECT_EQ(code(c), ErrorCode::InvalidParameter);
  c = SimConfig{};
  c.dt = 0.2;
  EXPECT_EQ(code(c), ErrorCode::InvalidParameter);
  c = SimConfig{};
  c.nbar = 0.0;
  EXPECT_EQ(code(c), ErrorCode::InvalidParameter);
  c = SimConfig{};
  c.save_stride = 0;
  EXPECT_EQ(code(c), ErrorCode::InvalidParameter);
  c = SimConfig{};
  c.total_time = -1.0;
  EXPECT_EQ(code(c), ErrorCode::InvalidParameter);
}

TEST(Divergence, GuardTrips) {
  auto code = [](PhaseState s) {
    try {
      check_divergence(s, 7);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode{0};
  };
  PhaseState s = initial_state(100.0);
  EXPECT_EQ(code(s), ErrorCode{0});
  s.theta = {701.0, 0.0};
  EXPECT_EQ(code(s), ErrorCode::Divergence);
  s = initial_state(100.0);
  s.omega_log = {-701.0, 0.0};
  EXPECT_EQ(code(s), ErrorCode::Divergence);
  s = initial_state(100.0);
  s.phi = {NAN, 0.0};
  EXPECT_EQ(code(s), ErrorCode::Divergence);
}

TEST(Divergence, EvolveAborts) {
  // a huge kick on xi1 pushes Re theta past the guard in one step
  SimConfig c = config(0.001);
  NoisePath p(4, c.steps());
  p(0, 3) = 1e7;
  EXPECT_THROW(evolve(p, c), Error);
}

TEST(Properties, WeightIsMartingale) {
  const SimConfig c = config(0.02);
  constexpr int kGroups = 10, kPer = 1000;
  std::vector<double> means;
  for (int g = 0; g < kGroups; ++g) {
    CompensatedSum s;
    for (int i = 0; i < kPer; ++i) {
      Rng rng(derive_seed(77, g * kPer + i));
      s.add(final_weight(sample(4, c.steps(), rng), c));
    }
    means.push_back(s.value() / kPer);
  }
  const MomentEstimate e = combine(means);
  EXPECT_LE(std::abs(e.mean - 1.0), 3.0 * e.error) << e.mean << " +- " << e.error;
}

TEST(Properties, WeightIsMartingaleOtherParameters) {
  SimConfig c = config(0.02);
  c.nbar = 25.0;
  c.gauge = {GaugeKind::Real, 1.0, 1.0, 25.0};
  std::vector<double> means;
  for (int g = 0; g < 10; ++g) {
    CompensatedSum s;
    for (int i = 0; i < 300; ++i) {
      Rng rng(derive_seed(78, g * 300 + i));
      s.add(final_weight(sample(4, c.steps(), rng), c));
    }
    means.push_back(s.value() / 300);
  }
  const MomentEstimate e = combine(means);
  EXPECT_LE(std::abs(e.mean - 1.0), 3.0 * e.error) << e.mean << " +- " << e.error;
}

TEST(Properties, ThetaVarianceIsGaussianDiffusion) {
  const SimConfig c = config(0.02);
  const std::size_t n = 4000;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(91, i));
    const FinalState f = evolve_final(sample(4, c.steps(), rng), c);
    x[i] = f.state.theta.real() - std::log(10.0);
    y[i] = -f.state.theta.imag();
  }
  const double expected = 0.25 * std::exp(-4.0) * c.total_time;
  const double band = 5.0 * expected * std::sqrt(2.0 / (n - 1));
  for (const auto* v : {&x, &y}) {
    double m = 0, ss = 0;
    for (double z : *v)
      m += z;
    m /= n;
    for (double z : *v)
      ss += (z - m) * (z - m);
    EXPECT_NEAR(ss / (n - 1), expected, band);
  }
}

TEST(Properties, StepRefinementLeavesWeightedXWithinError) {
  // The fine path's increments pair up into the coarse path's, so both
  // integrations follow the same Brownian path.
  SimConfig coarse = config(0.02);
  SimConfig fine = coarse;
  fine.dt = coarse.dt / 2;
  constexpr int kGroups = 10, kPer = 100;
  std::vector<double> diff;
  std::vector<double> xc_groups;
  for (int g = 0; g < kGroups; ++g) {
    std::vector<WeightedSample> sc, sf;
    for (int i = 0; i < kPer; ++i) {
      Rng rng(derive_seed(13, g * kPer + i));
      const NoisePath pf = sample(4, fine.steps(), rng);
      NoisePath pc(4, coarse.steps());
      for (std::size_t ch = 0; ch < 4; ++ch)
        for (std::size_t k = 0; k < coarse.steps(); ++k)
          pc(ch, k) = (pf(ch, 2 * k) + pf(ch, 2 * k + 1)) / std::sqrt(2.0);
      const FinalState fc = evolve_final(pc, coarse);
      const FinalState ff = evolve_final(pf, fine);
      sc.push_back({fc.state, fc.weight});
      sf.push_back({ff.state, ff.weight});
    }
    const double xc = weighted_moment(sc, kAmplitudeKernel).value;
    const double xf = weighted_moment(sf, kAmplitudeKernel).value;
    xc_groups.push_back(xc);
    diff.push_back(xf - xc);
  }
  const MomentEstimate stat = combine(xc_groups);
  const MomentEstimate d = combine(diff);
  EXPECT_LT(std::abs(d.mean), stat.error) << d.mean << " vs " << stat.error;
}

TEST(ComplexGauge, UsesTwoChannelsAndComplexWeight) {
  SimConfig c = config(0.01);
  c.gauge.kind = GaugeKind::Complex;
  EXPECT_EQ(c.channels(), 2u);
  Rng rng(8);
  const Trajectory t = evolve(sample(2, c.steps(), rng), c);
  EXPECT_NE(t.states.back().omega_log.imag(), 0.0);
  EXPECT_THROW(evolve(sample(4, c.steps(), rng), c), Error);
}

TEST(NoGauge, WeightStaysOne) {
  SimConfig c = config(0.01);
  c.gauge.kind = GaugeKind::None;
  Rng rng(8);
  const Trajectory t = evolve(sample(2, c.steps(), rng), c);
  for (const auto& s : t.states)
    EXPECT_EQ(s.omega_log, cplx(0.0));
}
