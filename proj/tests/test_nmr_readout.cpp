#include "mixgp/nmr_readout.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mixgp;

namespace {

// Probe in |+>, system and ancilla in |00>: a single line.
Register3 probe_plus() {
    Register3 reg(Register3::ground_state().as_density());
    reg.apply(gate::PseudoHadamard{qubit::probe});
    return reg;
}

std::size_t peak_index(const Spectrum& s) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < s.values.size(); ++j) {
        if (std::abs(s.values[j]) > std::abs(s.values[best])) best = j;
    }
    return best;
}

}  // namespace

TEST(Hamiltonian, ZeroSystemIsZero) {
    SpinSystem sys;
    sys.j12 = sys.j13 = sys.j23 = 0.0;
    EXPECT_EQ(max_abs(internal_hamiltonian(sys)), 0.0);
}

TEST(Hamiltonian, SingleCouplingSpectrum) {
    SpinSystem sys;
    sys.j12 = sys.j23 = 0.0;
    const Eigen::MatrixXcd h = internal_hamiltonian(sys);
    const Eigen::VectorXd e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues();
    for (Eigen::Index i = 0; i < e.size(); ++i) EXPECT_NEAR(std::abs(e(i)), 2 * kPi * 54.1 / 4, 1e-10);
    EXPECT_NEAR(e.sum(), 0.0, 1e-10);
}

TEST(Hamiltonian, RejectsNonFinite) {
    SpinSystem sys;
    sys.j23 = std::nan("");
    EXPECT_THROW(internal_hamiltonian(sys), std::domain_error);
}

TEST(Acquisition, Validation) {
    AcquisitionConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.npoints = 1000;
    EXPECT_THROW(cfg.validate(), std::domain_error);
    cfg = {};
    cfg.t2 = 0.0;
    EXPECT_THROW(cfg.validate(), std::domain_error);
    EXPECT_THROW(acquire_fid(Register3::ground_state(), SpinSystem{}, AcquisitionConfig{}), std::invalid_argument);
}

TEST(Fid, MixedProbeIsSilent) {
    const Register3 reg(ComplexMatrix(pauli::identity(8) / 8.0));
    const FID fid = acquire_fid(reg, SpinSystem{}, AcquisitionConfig{});
    for (const complex& s : fid.samples) EXPECT_LE(std::abs(s), 1e-15);
}

TEST(Fid, UncoupledIsPureDecay) {
    SpinSystem sys;
    sys.j12 = sys.j13 = sys.j23 = 0.0;
    const AcquisitionConfig cfg{1e-3, 256, 0.1};
    const FID fid = acquire_fid(probe_plus(), sys, cfg);
    for (int k = 0; k < cfg.npoints; ++k) {
        EXPECT_LE(std::abs(fid.samples[k] - 0.5 * std::exp(-k * cfg.dwell / cfg.t2)), 1e-14);
    }
}

TEST(Fid, SingleLineMatchesAnalyticSignal) {
    // Spectators up: the probe sees a static shift of π(J12 + J13)·σ_z/2.
    const SpinSystem sys;
    const AcquisitionConfig cfg{2e-3, 512, 0.5};
    const FID fid = acquire_fid(probe_plus(), sys, cfg);
    for (int k = 0; k < cfg.npoints; ++k) {
        const double t = k * cfg.dwell;
        const complex expected = 0.5 * std::exp(complex(-t / cfg.t2, -kPi * (sys.j12 + sys.j13) * t));
        EXPECT_LE(std::abs(fid.samples[k] - expected), 1e-12);
    }
}

TEST(Fid, GeneralStateMatchesDirectPropagation) {
    const SpinSystem sys;
    const AcquisitionConfig cfg{2e-3, 64, 0.5};
    const ComplexMatrix rho = test::random_density(8);
    const FID fid = acquire_fid(Register3(rho), sys, cfg);
    const ComplexMatrix h = internal_hamiltonian(sys);
    const ComplexMatrix lower = probe_lowering();
    for (int k = 0; k < cfg.npoints; k += 7) {
        const double t = k * cfg.dwell;
        const ComplexMatrix u = test::taylor_expm(h, t / 16.0);
        ComplexMatrix ut = ComplexMatrix::Identity(8, 8);
        for (int i = 0; i < 16; ++i) ut = ut * u;
        const complex expected = (ut * rho * ut.adjoint() * lower).trace() * std::exp(-t / cfg.t2);
        EXPECT_LE(std::abs(fid.samples[k] - expected), 1e-9);
    }
}

TEST(Dft, MatchesNaiveOracle) {
    FID fid{{}, 1e-3};
    for (int i = 0; i < 64; ++i) fid.samples.emplace_back(test::uniform(-1, 1), test::uniform(-1, 1));
    const Spectrum s = dft(fid);
    const auto ref = test::naive_centered_dft(fid.samples);
    for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_LE(std::abs(s.values[j] - ref[j]), 1e-12);
    EXPECT_DOUBLE_EQ(s.freq_axis[32], 0.0);
    EXPECT_DOUBLE_EQ(s.bin_width(), 1.0 / 64e-3);
}

TEST(Dft, ConstantPeaksAtZero) {
    const FID fid{std::vector<complex>(128, complex(1, 0)), 1e-3};
    const Spectrum s = dft(fid);
    EXPECT_NEAR(s.values[64].real(), 128.0, 1e-12);
    EXPECT_EQ(peak_index(s), 64u);
}

TEST(Dft, PositiveFrequencyPeaksAbove) {
    const double dt = 1e-3;
    const int n = 256;
    const double f = 10 / (n * dt);  // on bin +10
    FID fid{{}, dt};
    for (int k = 0; k < n; ++k) fid.samples.push_back(std::polar(1.0, 2 * kPi * f * k * dt));
    const Spectrum s = dft(fid);
    EXPECT_EQ(peak_index(s), static_cast<std::size_t>(n / 2 + 10));
}

TEST(Dft, ParsevalAndInverse) {
    FID fid{{}, 5e-4};
    for (int i = 0; i < 128; ++i) fid.samples.emplace_back(test::uniform(-1, 1), test::uniform(-1, 1));
    const Spectrum s = dft(fid);
    double et = 0, ef = 0;
    for (auto x : fid.samples) et += std::norm(x);
    for (auto x : s.values) ef += std::norm(x);
    EXPECT_NEAR(ef / 128.0, et, 1e-10);
    const FID back = inverse_dft(s);
    EXPECT_NEAR(back.dwell, fid.dwell, 1e-18);
    for (int i = 0; i < 128; ++i) EXPECT_LE(std::abs(back.samples[i] - fid.samples[i]), 1e-13);
}

TEST(Dft, RejectsBadLengths) {
    EXPECT_THROW(dft(FID{std::vector<complex>(100), 1e-3}), std::domain_error);
    EXPECT_THROW(dft(FID{std::vector<complex>(128), 0.0}), std::domain_error);
}

TEST(Lines, Positions) {
    const SpinSystem sys;
    const auto m = probe_multiplet(sys);
    EXPECT_NEAR(m[0], -27.7, 1e-12);
    EXPECT_NEAR(m[1], -26.4, 1e-12);
    EXPECT_NEAR(m[2], 26.4, 1e-12);
    EXPECT_NEAR(m[3], 27.7, 1e-12);
    const auto l = interferometer_lines(sys);
    EXPECT_NEAR(l[0], -26.4, 1e-12);
    EXPECT_NEAR(l[1], 26.4, 1e-12);
}

TEST(Lines, SingleLineAppearsAtPositiveSum) {
    const AcquisitionConfig cfg;
    const Spectrum s = dft(conjugated(acquire_fid(probe_plus(), SpinSystem{}, cfg)));
    EXPECT_NEAR(s.freq_axis[peak_index(s)], 26.4, s.bin_width());
}

TEST(ExtractPhase, ShiftsWithGlobalPhase) {
    const AcquisitionConfig cfg;
    const Spectrum s = dft(conjugated(acquire_fid(probe_plus(), SpinSystem{}, cfg)));
    const auto lines = interferometer_lines(SpinSystem{});
    const auto windows = windows_around(lines, cfg);
    const PhaseResult base = extract_phase(s, windows);
    // Truncating the line tails leaves a bias of a few microradians.
    EXPECT_NEAR(base.phase, 0.0, 1e-5);
    for (double phi : {0.3, -1.2, 2.9}) {
        Spectrum rotated = s;
        for (complex& v : rotated.values) v *= std::polar(1.0, phi);
        EXPECT_NEAR(wrap_phase(extract_phase(rotated, windows).phase - base.phase - phi), 0.0, 1e-12);
    }
}

TEST(ExtractPhase, WindowErrors) {
    const AcquisitionConfig cfg{2e-3, 256, 0.5};
    const Spectrum s = dft(conjugated(acquire_fid(probe_plus(), SpinSystem{}, cfg)));
    const std::vector<FrequencyWindow> none;
    EXPECT_THROW(extract_phase(s, none), std::invalid_argument);
    const std::vector<FrequencyWindow> empty = {{1.0, 1.0}};
    EXPECT_THROW(extract_phase(s, empty), std::invalid_argument);
    const std::vector<FrequencyWindow> overlap = {{0.0, 2.0}, {1.0, 3.0}};
    EXPECT_THROW(extract_phase(s, overlap), std::invalid_argument);
    const std::vector<FrequencyWindow> outside = {{200.0, 300.0}};
    EXPECT_THROW(extract_phase(s, outside), std::out_of_range);
}

TEST(ExtractPhase, SilentSpectrumIsUndefined) {
    const Spectrum s = dft(FID{std::vector<complex>(256), 2e-3});
    const std::vector<FrequencyWindow> w = {{-1.0, 1.0}};
    EXPECT_FALSE(extract_phase(s, w).defined);
}

TEST(Pipeline, IdentityPartIsSilent) {
    // The (1−ε)/8 part of ρ_000 carries no probe coherence through any unitary.
    const MixedQubit q = MixedQubit::from_purity(0.5);
    const AncillaScheme sch = sjoqvist_ancilla(kPi / 3, 1.0);
    const Register3 out = pseudo_pure_output(q, sch, PseudoPureConfig{1.0});
    const Register3 mixed(ComplexMatrix(pauli::identity(8) / 8.0));
    const AcquisitionConfig cfg{2e-3, 256, 0.5};
    const FID a = acquire_fid(out, SpinSystem{}, cfg);
    const FID b = acquire_fid(pseudo_pure_output(q, sch, PseudoPureConfig{0.25}), SpinSystem{}, cfg);
    for (int k = 0; k < cfg.npoints; ++k) EXPECT_LE(std::abs(0.25 * a.samples[k] - b.samples[k]), 1e-14);
    for (const complex& s : acquire_fid(mixed, SpinSystem{}, cfg).samples) EXPECT_LE(std::abs(s), 1e-15);
}

TEST(Pipeline, RecoversAmplitudePhase) {
    const MixedQubit q = MixedQubit::from_purity(1.0 / 3.0);
    const AncillaScheme sch = sjoqvist_ancilla(kPi / 6, 1.0);
    const PhaseResult expected = phase_of(interference_amplitude(q, sch));
    const PhaseResult got = nmr_phase(q, sch, PseudoPureConfig{1e-5}, SpinSystem{}, AcquisitionConfig{});
    ASSERT_TRUE(got.defined);
    EXPECT_NEAR(wrap_phase(got.phase - expected.phase), 0.0, 5e-3);
    EXPECT_NEAR(got.visibility, expected.visibility, 5e-3);
}

TEST(Pipeline, RecoversUhlmannPhaseAcrossGrid) {
    for (double r : {0.0, 0.5, 1.0}) {
        const MixedQubit q = MixedQubit::from_purity(r);
        for (double th : {0.3, 1.0, 1.5}) {
            const AncillaScheme sch = uhlmann_ancilla(q, th, 1.0);
            const PhaseResult expected = phase_of(interference_amplitude(q, sch));
            const PhaseResult got = nmr_phase(q, sch, PseudoPureConfig{1e-5}, SpinSystem{}, AcquisitionConfig{});
            if (expected.visibility <= 1e-6) continue;
            EXPECT_NEAR(wrap_phase(got.phase - expected.phase), 0.0, 5e-3) << r << " " << th;
        }
    }
}

TEST(Pipeline, StableUnderLongerAcquisition) {
    // The record has decayed well before 4096 points at T2 = 0.25 s, so more
    // points change the window integrals only through the vanishing tail.
    const MixedQubit q = MixedQubit::from_purity(0.6);
    const AncillaScheme sch = uhlmann_ancilla(q, 0.8, 1.0);
    const Register3 out = pseudo_pure_output(q, sch, PseudoPureConfig{1e-3});
    AcquisitionConfig a{2e-3, 4096, 0.25};
    AcquisitionConfig b{2e-3, 8192, 0.25};
    const auto lines = probe_multiplet(SpinSystem{});
    const auto windows = windows_around(lines, a, 1.0);
    const complex ia = window_integral(interferometer_spectrum(out, SpinSystem{}, a), windows);
    const complex ib = window_integral(interferometer_spectrum(out, SpinSystem{}, b), windows);
    EXPECT_LE(std::abs(ia - ib), 1e-9 * std::abs(ia));
}

TEST(Csv, FidAndSpectrumFormat) {
    const FID fid{{complex(1, 0), complex(0, -0.5)}, 1e-3};
    std::ostringstream os;
    write_csv(os, fid);
    EXPECT_EQ(os.str(), "index,time_s,re,im\n0,0,1,0\n1,0.001,0,-0.5\n");
    std::ostringstream ss;
    write_csv(ss, dft(fid));
    EXPECT_EQ(ss.str().substr(0, 20), "index,freq_hz,re,im\n");
}
