#include <gtest/gtest.h>

#include "efqse/errors.hpp"
#include "efqse/estimation.hpp"
#include "efqse/noise.hpp"

using namespace efqse;

TEST(Readout, CorruptionPreservesShotTotal) {
  Histogram h(8, 0);
  h[0b101] = 5000;
  h[0b010] = 3000;
  const auto out = corrupt_counts(h, ReadoutModel::uniform(3, 0.1), 3);
  EXPECT_EQ(histogram_total(out), 8000u);
  EXPECT_EQ(corrupt_counts(h, ReadoutModel::none(3), 3), h);
}

TEST(Readout, AsymmetricFlipsBiasTheMean) {
  ReadoutModel m;
  m.p01 = {0.0};
  m.p10 = {0.2};
  Histogram ones = {0, 100000};
  const auto out = corrupt_counts(ones, m, 12);
  EXPECT_NEAR(static_cast<double>(out[0]) / 1e5, 0.2, 0.005);
}

TEST(Readout, ValidationRejectsRatesAtOneHalf) {
  EXPECT_THROW(ReadoutModel::uniform(2, 0.5).validate(), ConfigError);
  EXPECT_THROW(ReadoutModel::uniform(2, -0.01).validate(), ConfigError);
  EXPECT_NO_THROW(ReadoutModel::uniform(2, 0.49).validate());
}

TEST(Twirling, SymmetrizesAnAsymmetricChannel) {
  // With p01 = 0 and p10 = 0.2 the twirled channel flips both states at 0.1.
  ReadoutModel m;
  m.p01 = {0.0};
  m.p10 = {0.2};
  std::mt19937_64 rng(5);
  const auto from0 = twirled_readout({200000, 0}, m, rng);
  const auto from1 = twirled_readout({0, 200000}, m, rng);
  EXPECT_NEAR(static_cast<double>(from0[1]) / 2e5, 0.1, 0.003);
  EXPECT_NEAR(static_cast<double>(from1[0]) / 2e5, 0.1, 0.003);
}

TEST(Calibration, AttenuationIsOneMinusTwiceTheFlipRate) {
  const auto cal = calibrate_readout(ReadoutModel::uniform(3, 0.05), 200000, true, 8);
  ASSERT_EQ(cal.attenuation.size(), 3u);
  for (int q = 0; q < 3; ++q) {
    EXPECT_NEAR(cal.flip_rate[static_cast<std::size_t>(q)], 0.05, 0.003);
    EXPECT_NEAR(cal.attenuation[static_cast<std::size_t>(q)], 1.0 - 2.0 * cal.flip_rate[static_cast<std::size_t>(q)],
                1e-12);
  }
  EXPECT_NEAR(cal.attenuation_of(0b101), cal.attenuation[0] * cal.attenuation[2], 1e-12);
  EXPECT_DOUBLE_EQ(ReadoutCalibration::ideal(3).attenuation_of(0b111), 1.0);
}

TEST(PostSelection, KeepsCorrectWeightOnly) {
  Histogram h(8, 0);
  h[0b011] = 60;
  h[0b101] = 20;
  h[0b001] = 15;
  h[0b111] = 5;
  const auto ps = post_select(h, 2);
  EXPECT_EQ(histogram_total(ps.counts), 80u);
  EXPECT_DOUBLE_EQ(ps.acceptance_rate, 0.8);
  EXPECT_THROW(post_select(h, 0), NumericalError);
}

TEST(Parity, MeanAndStandardError) {
  Histogram h = {75, 25};
  const auto [mean, err] = parity_mean_and_error(h, 0b1);
  EXPECT_DOUBLE_EQ(mean, 0.5);
  EXPECT_NEAR(err, std::sqrt((1.0 - 0.25) / 100.0), 1e-12);
}

TEST(Mitigation, RemovesReadoutBiasWithinErrorBars) {
  // |0...0> on two qubits: <Z0 Z1> = 1 ideally and (1 - 2p)^2 after readout.
  const CountsExecutor exec = [](std::uint64_t shots, std::uint64_t) {
    Histogram h(4, 0);
    h[0] = shots;
    return h;
  };
  const double p = 0.04;
  const auto r = twirled_readout_mitigation(exec, 0b11, ReadoutModel::uniform(2, p), 200000, 21);
  EXPECT_NEAR(r.raw_value, (1 - 2 * p) * (1 - 2 * p), 4 * r.raw_sigma + 1e-3);
  EXPECT_LT(std::abs(r.value - 1.0), 4 * r.sigma);
  EXPECT_GT(r.sigma, r.raw_sigma);
}

TEST(Modes, ParseAndName) {
  EXPECT_EQ(parse_mode("noisy"), ExecutionMode::Noisy);
  EXPECT_EQ(mode_name(ExecutionMode::Sampled), "sampled");
  EXPECT_THROW(parse_mode("quantum"), Error);
}

TEST(Plans, TomographyAssignsEveryPauliOnce) {
  const auto plan = MeasurementPlan::tomography(3);
  EXPECT_EQ(plan.settings.size(), 27u);
  EXPECT_EQ(plan.n_members(), 63u);
  std::vector<int> seen(64, 0);
  for (const auto& ms : plan.members)
    for (const auto& m : ms) ++seen[m.pauli_index];
  EXPECT_EQ(seen[0], 0);
  for (std::size_t i = 1; i < 64; ++i) EXPECT_EQ(seen[i], 1);
}

TEST(Plans, GroupedSettingsCommuteQubitWise) {
  std::vector<PauliString> ps;
  for (const char* s : {"XXI", "XIZ", "ZZI", "IYY", "ZIZ", "YYI"}) ps.push_back(PauliString::from_letters(s));
  const auto plan = MeasurementPlan::grouped(3, ps);
  EXPECT_EQ(plan.n_members(), ps.size());
  for (std::size_t g = 0; g < plan.settings.size(); ++g)
    for (const auto& m : plan.members[g]) {
      const auto p = PauliString::from_index(m.pauli_index, 3);
      const std::string letters = p.letters(3);
      for (int q = 0; q < 3; ++q) {
        const char c = letters[static_cast<std::size_t>(q)];
        if (c == 'I') continue;
        const Axis want = c == 'X' ? Axis::X : (c == 'Y' ? Axis::Y : Axis::Z);
        EXPECT_EQ(plan.settings[g][static_cast<std::size_t>(q)], want);
      }
    }
}

TEST(Measure, EstimatesAreSeededAndThreadIndependent) {
  QubitState s(2);
  apply_vprep(s, 0, 1, phi_variant(1));
  auto plan = std::make_shared<const MeasurementPlan>(MeasurementPlan::tomography(2));
  SamplingOptions o;
  o.shots = 5000;
  o.seed = 77;
  o.threads = 1;
  const auto a = measure({{s, 1}}, plan, o, 3);
  o.threads = 4;
  const auto b = measure({{s, 1}}, plan, o, 3);
  EXPECT_EQ(a.values(0), b.values(0));
  const auto yx = PauliString::from_letters("YX").index(2);
  const auto xy = PauliString::from_letters("XY").index(2);
  // phi_1 = (|10> + i|01>)/sqrt2 has <X0 Y1> = -<Y0 X1> with magnitude 1.
  EXPECT_NEAR(std::abs(a.value(0, yx)), 1.0, 0.05);
  EXPECT_NEAR(a.value(0, yx), -a.value(0, xy), 0.05);
}
