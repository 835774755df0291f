// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "imdd/channel.hpp"
#include "imdd/gray.hpp"
#include "imdd/link.hpp"
#include "imdd/rng.hpp"
#include "imdd/rrc.hpp"

using namespace imdd;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

CVec<double> spectrum(const VecXd& x) {
  Eigen::FFT<double> fft;
  CVec<double> X(x.size());
  fft.fwd(X.data(), x.data(), x.size());
  return X;
}
}  // namespace

TEST_CASE("gray labels: adjacency and round trip") {
  for (int k = 0; k < 4; ++k) {
    CHECK(bits_to_index(kGrayBits[k][0], kGrayBits[k][1]) == k);
    CHECK(bit_errors(k, k) == 0);
  }
  // Adjacent amplitudes differ in exactly one bit; the outermost pair in one.
  CHECK(bit_errors(0, 1) == 1);
  CHECK(bit_errors(1, 2) == 1);
  CHECK(bit_errors(2, 3) == 1);
  CHECK(bit_errors(0, 3) == 1);
  CHECK(bit_errors(0, 2) == 2);
  CHECK(bit_errors(1, 3) == 2);
  CHECK(symbol_value(0) == -3.0);
  CHECK(symbol_value(3) == 3.0);
}

TEST_CASE("rrc taps: normalisation, symmetry and Nyquist cascade") {
  const int n_up = 3, span = 32;
  const VecXd h = rrc_taps<double>(n_up, 0.2, span);
  CHECK(h.size() == 2 * span * n_up + 1);
  CHECK(h.squaredNorm() * n_up == doctest::Approx(1.0).epsilon(1e-12));
  for (Index i = 0; i < h.size(); ++i)
    CHECK(h[i] == doctest::Approx(h[h.size() - 1 - i]).epsilon(1e-12));

  // TX/RX cascade must be (nearly) free of inter-symbol interference:
  // samples of h*h at non-zero multiples of the symbol period stay below
  // 1e-3 of the peak.
  const Index n = h.size();
  VecXd casc = VecXd::Zero(2 * n - 1);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) casc[i + j] += h[i] * h[j];
  const Index mid = n - 1;
  CHECK(casc[mid] == doctest::Approx(1.0 / n_up).epsilon(1e-6));
  double worst = 0;
  for (int k = 1; k < span; ++k)
    worst = std::max(worst, std::abs(casc[mid + k * n_up]) / casc[mid]);
  CHECK(worst < 1e-3);
}

TEST_CASE("rrc taps: float instantiation matches double") {
  const Vec<float> hf = rrc_taps<float>(3, 0.2f, 8);
  const VecXd hd = rrc_taps<double>(3, 0.2, 8);
  REQUIRE(hf.size() == hd.size());
  for (Index i = 0; i < hf.size(); ++i)
    CHECK(double(hf[i]) == doctest::Approx(hd[i]).epsilon(1e-5));
}

TEST_CASE("upsampler and cyclic filter alignment") {
  VecXd y(4);
  y << 1, -2, 3, -4;
  const VecXd up = upsample_zero_stuff(y, 3);
  REQUIRE(up.size() == 12);
  CHECK(up[0] == 1);
  CHECK(up[3] == -2);
  CHECK(up[1] == 0);

  // A zero-phase kernel must keep an impulse where it is.
  VecXd x = VecXd::Zero(32);
  x[5] = 1.0;
  VecXd taps(5);
  taps << 0.5, 1.0, 2.0, 1.0, 0.5;
  const VecXd f = cyclic_filter(x, taps);
  CHECK(f[5] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f[4] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f[6] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f[3] == doctest::Approx(0.5).epsilon(1e-9));
  // ... and wrap circularly at the boundary.
  VecXd xe = VecXd::Zero(32);
  xe[0] = 1.0;
  const VecXd fe = cyclic_filter(xe, taps);
  CHECK(fe[31] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fe[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("carrier-to-signal power ratio of the shaped drive") {
  LinkParams p;
  Rng rng(substream(1, "frame"));
  const SymbolFrame frame = draw_symbol_frame(p.frame_symbols, rng);
  const VecXd s = shape_and_bias(frame.values(), p);
  const double sig_power = (s.array() - p.bias).square().mean();
  const double cspr_db = 10.0 * std::log10(p.bias * p.bias / sig_power);
  CHECK(cspr_db == doctest::Approx(9.6).epsilon(0.0105));  // ±0.1 dB
}

TEST_CASE("chromatic dispersion is an allpass") {
  LinkParams p;
  Rng rng(substream(2, "frame"));
  const VecXd s = shape_and_bias(draw_symbol_frame(512, rng).values(), p);
  const CVec<double> out = chromatic_dispersion(s, p);
  CHECK(out.squaredNorm() ==
        doctest::Approx(s.squaredNorm()).epsilon(1e-10));
  // Zero length leaves the waveform untouched.
  LinkParams p0 = p;
  p0.fiber_length = 0.0;
  const CVec<double> id = chromatic_dispersion(s, p0);
  CHECK((id.real() - s).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(id.imag().cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("dispersion group delay spread between the Nyquist edges") {
  // Probe the implementation: disperse an impulse, read the spectral phase
  // and differentiate it numerically at +-f_N = +-baud/2.
  LinkParams p;
  const Index L = 30000;
  VecXd x = VecXd::Zero(L);
  x[0] = 1.0;
  const CVec<double> resp = chromatic_dispersion(x, p);
  Eigen::FFT<double> fft;
  CVec<double> F(L);
  CVec<double> tmp = resp;
  fft.fwd(F.data(), tmp.data(), L);

  const double fs = p.sample_rate();
  const double df = fs / double(L);
  auto group_delay = [&](Index k) {
    const double dphi =
        std::arg(F[(k + 1) % L] / F[(k - 1 + L) % L]);  // principal value
    return -dphi / (2.0 * M_PI * 2.0 * df);
  };
  const Index k_nyq = Index(std::lround(p.baud_rate / 2.0 / df));
  const double spread_s = std::abs(group_delay(k_nyq) - group_delay(L - k_nyq));
  const double spread_symbols = spread_s * p.baud_rate;
  CHECK(spread_symbols == doctest::Approx(1.35).epsilon(0.0075));  // ±0.01

  // Phase rotation magnitude at +f_N.
  CHECK(std::abs(std::arg(F[k_nyq])) == doctest::Approx(1.06).epsilon(0.01));
}

TEST_CASE("square-law detector") {
  CVec<double> f(2);
  f << std::complex<double>(3.0, 4.0), std::complex<double>(-1.5, 0.0);
  const VecXd i = photodiode(f);
  CHECK(i[0] == doctest::Approx(25.0));
  CHECK(i[1] == doctest::Approx(2.25));
}

TEST_CASE("dispersion + square law attenuate the Nyquist beat tone") {
  // A small tone at f_N rides on the carrier; after the fiber the
  // carrier-signal beat at the detector is scaled by |cos(phi(f_N))|,
  // about -6.2 dB for the default link.
  LinkParams p;
  const Index L = 30000;
  const double fs = p.sample_rate();
  const Index k_nyq = Index(std::lround(p.baud_rate / 2.0 * L / fs));
  VecXd x(L);
  for (Index t = 0; t < L; ++t)
    x[t] = p.bias + 0.01 * std::cos(2.0 * M_PI * double(k_nyq) * double(t) / double(L));

  const VecXd with_fiber = photodiode(chromatic_dispersion(x, p));
  const VecXd back_to_back = x.cwiseAbs2();
  const double a = std::abs(spectrum(with_fiber)[k_nyq]);
  const double b = std::abs(spectrum(back_to_back)[k_nyq]);
  const double att_db = 20.0 * std::log10(a / b);
  CHECK(att_db == doctest::Approx(-6.2).epsilon(0.0162));  // ±0.1 dB
}

TEST_CASE("awgn: determinism, variance, -inf disables") {
  VecXd x = VecXd::Zero(30000);
  Rng r1(substream(3, "noise")), r2(substream(3, "noise"));
  VecXd a = x, b = x;
  add_awgn(a, -5.0, r1);
  add_awgn(b, -5.0, r2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const double want = std::pow(10.0, -5.0 / 10.0);
  CHECK(a.squaredNorm() / double(a.size()) ==
        doctest::Approx(want).epsilon(0.05));
  VecXd c = x;
  Rng r3(7);
  add_awgn(c, -kInf, r3);
  CHECK(c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("back-to-back electrical path is affine in the symbols") {
  // No fiber, no detector: shaping followed by the matched filter should
  // reproduce the symbols up to the cascade gain and the filtered bias.
  LinkParams p;
  Rng rng(substream(4, "frame"));
  const SymbolFrame frame = draw_symbol_frame(p.frame_symbols, rng);
  const VecXd y = frame.values();
  const RxSamples z = matched_filter_downsample(shape_and_bias(y, p), p);
  REQUIRE(z.size() == y.size());

  const double my = y.mean(), mz = z.mean();
  const double cov = ((y.array() - my) * (z.array() - mz)).mean();
  const double vy = (y.array() - my).square().mean();
  const double slope = cov / vy;
  const double intercept = mz - slope * my;
  const VecXd resid = z - (slope * y.array() + intercept).matrix();
  CHECK(slope == doctest::Approx(1.0 / 3.0).epsilon(3e-3));
  CHECK(intercept == doctest::Approx(2.2495).epsilon(1e-3));
  CHECK(std::sqrt(resid.squaredNorm() / double(resid.size())) < 2e-3);
  const double corr = cov / std::sqrt(vy * (z.array() - mz).square().mean());
  CHECK(corr > 0.999);
}

TEST_CASE("noiseless dispersionless link separates four clusters") {
  LinkParams p;
  p.fiber_length = 0.0;
  Rng rng(substream(5, "frame"));
  const SymbolFrame frame = draw_symbol_frame(p.frame_symbols, rng);
  const RxSamples z = simulate_link(frame, p, -kInf, rng);

  std::array<double, 4> lo, hi, mean, count;
  lo.fill(1e30);
  hi.fill(-1e30);
  mean.fill(0);
  count.fill(0);
  for (Index i = 0; i < z.size(); ++i) {
    const int k = frame.index[i];
    lo[k] = std::min(lo[k], z[i]);
    hi[k] = std::max(hi[k], z[i]);
    mean[k] += z[i];
    count[k] += 1;
  }
  for (int k = 0; k < 4; ++k) mean[k] /= count[k];

  // Square-law images of the four amplitudes.  The detector leaves residual
  // nonlinear ISI, so the clusters have finite width, but they must stay
  // disjoint, ordered and visibly non-equidistant.
  const std::array<double, 4> want{1.48, 3.75, 6.75, 10.48};
  for (int k = 0; k < 4; ++k)
    CHECK(mean[k] == doctest::Approx(want[k]).epsilon(0.05));
  for (int k = 0; k < 3; ++k) CHECK(hi[k] < lo[k + 1]);
  const double g0 = mean[1] - mean[0], g2 = mean[3] - mean[2];
  CHECK(g2 - g0 > 0.5);  // upper gap clearly wider: the map is not affine
}

TEST_CASE("simulate_link determinism and shape") {
  LinkParams p;
  p.frame_symbols = 2000;
  Rng ra(substream(6, "frame"));
  const SymbolFrame frame = draw_symbol_frame(p.frame_symbols, ra);
  Rng n1(substream(6, "noise", 0, 0)), n2(substream(6, "noise", 0, 0));
  const RxSamples z1 = simulate_link(frame, p, -3.0, n1);
  const RxSamples z2 = simulate_link(frame, p, -3.0, n2);
  REQUIRE(z1.size() == p.frame_symbols);
  CHECK((z1 - z2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("chunk extraction drops edges and centres the window") {
  LinkParams p;
  Rng rng(substream(7, "frame"));
  const SymbolFrame frame = draw_symbol_frame(p.frame_symbols, rng);
  const RxSamples rx = simulate_link(frame, p, -kInf, rng);
  const MatXd chunks = extract_chunks(rx, 7);
  CHECK(chunks.rows() == 9994);
  CHECK(chunks.cols() == 7);
  for (Index i : {Index(0), Index(17), Index(9993)})
    CHECK(chunks(i, 3) == rx[i + 3]);

  const LabeledDataset d = make_dataset(frame, p, -kInf, 7, rng);
  CHECK(d.size() == 9994);
  CHECK(d.labels[0] == frame.index[3]);
  CHECK(d.labels[9993] == frame.index[9996]);
  CHECK(d.n_tap() == 7);

  // n_tap = 1 keeps every symbol.
  const MatXd one = extract_chunks(rx, 1);
  CHECK(one.rows() == rx.size());
  CHECK(one(42, 0) == rx[42]);
}
