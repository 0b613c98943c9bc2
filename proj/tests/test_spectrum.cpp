#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ionspec/spectrum.hpp"

using namespace ionspec;
using doctest::Approx;

namespace {

constexpr double two_pi = 6.283185307179586;

SignalGrid make_grid(int g, double dt, auto f) {
    SignalGrid s;
    s.dt = dt;
    s.t1 = s.t3 = Eigen::VectorXd::LinSpaced(g, 0, (g - 1) * dt);
    s.values = CMat(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) s.values(i, j) = f(s.t1[i], s.t3[j]);
    return s;
}

cplx tone(double w1, double w3, double t1, double t3) {
    return std::exp(cplx(0, -w1 * t1 - w3 * t3));
}

}  // namespace

TEST_CASE("fft2 equals a direct DFT") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int g : {5, 6}) {
        SignalGrid s = make_grid(g, 1e-5, [&](double, double) { return cplx(nd(rng), nd(rng)); });
        Spectrum2D sp = fft2(s);
        const double bin = two_pi / (g * 1e-5);
        CHECK(sp.bin_width == Approx(bin));
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) {
                const double w1 = sp.omega1[a], w3 = sp.omega3[b];
                cplx sum = 0;
                for (int i = 0; i < g; ++i)
                    for (int j = 0; j < g; ++j)
                        sum += s.values(i, j) * std::exp(cplx(0, -w1 * s.t1[i] - w3 * s.t3[j]));
                CHECK(std::abs(sum - sp.values(a, b)) < 1e-11);
            }
        CHECK(sp.omega1[sp.zero_bin] == 0.0);
        CHECK(spectral_energy(sp) == Approx(time_energy(s)).epsilon(1e-12));
    }
}

TEST_CASE("pure tone lands on its bin") {
    const int g = 32;
    const double dt = 10e-6, bin = two_pi / (g * dt);
    const double nu1 = 3 * bin, nu3 = -5 * bin;
    SignalGrid s = make_grid(g, dt, [&](double a, double b) { return tone(nu1, nu3, a, b); });
    FftOptions o;
    o.carrier_offset = -two_pi * 1e5;
    Spectrum2D sp = fft2(s, o);
    Eigen::MatrixXd mag = sp.magnitude();
    Eigen::Index r, c;
    mag.maxCoeff(&r, &c);
    // exp(-i nu t) shows up at omega = -nu
    CHECK(r == sp.zero_bin - 3);
    CHECK(c == sp.zero_bin + 5);
    CHECK(sp.omega1[r] == Approx(o.carrier_offset - nu1));
    CHECK(mag(r, c) == Approx(g * g));
    mag(r, c) = 0;
    CHECK(mag.maxCoeff() < 1e-9);

    auto peaks = find_peaks(sp, 0.1);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].omega1 == Approx(o.carrier_offset - nu1).epsilon(1e-12));
    CHECK(peaks[0].omega3 == Approx(o.carrier_offset - nu3).epsilon(1e-12));

    o.notch_carrier = true;
    SignalGrid dc = make_grid(g, dt, [](double, double) { return cplx(1, 0); });
    CHECK(fft2(dc, o).magnitude().maxCoeff() < 1e-9);
}

TEST_CASE("zero padding and windowing") {
    const int g = 24;
    const double dt = 10e-6, bin = two_pi / (g * dt);
    const double nu = 2.37 * bin;
    SignalGrid s = make_grid(g, dt, [&](double a, double b) { return tone(nu, -nu, a, b); });
    FftOptions o;
    o.zero_pad = 4;
    Spectrum2D sp = fft2(s, o);
    CHECK(sp.values.rows() == 96);
    CHECK(sp.bin_width == Approx(bin / 4));
    auto peaks = find_peaks(sp, 0.5);
    REQUIRE(!peaks.empty());
    CHECK(std::abs(peaks[0].omega1 + nu) < sp.bin_width);
    CHECK(std::abs(peaks[0].omega3 - nu) < sp.bin_width);
    // padding interpolates: original bins are every 4th padded bin
    Spectrum2D plain = fft2(s);
    for (int k = 0; k < g; ++k)
        CHECK(std::abs(sp.values(4 * k, 4 * k) - plain.values(k, k)) < 1e-9);

    // cosine taper lowers far sidelobes of an off-bin tone
    FftOptions w;
    w.window = Window::Cosine;
    Spectrum1D raw = project_1d(s, Axis::Omega1);
    Spectrum1D tap = project_1d(s, Axis::Omega1, w);
    auto far = [&](const Spectrum1D& x) {
        Eigen::VectorXd m = x.values.cwiseAbs();
        m /= m.maxCoeff();
        return m[(x.values.size() / 2 + 10) % x.values.size()];
    };
    CHECK(far(tap) < far(raw));
}

TEST_CASE("projection is the DFT of the edge line") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    const int g = 10;
    SignalGrid s = make_grid(g, 2e-5, [&](double, double) { return cplx(nd(rng), nd(rng)); });
    for (Axis ax : {Axis::Omega1, Axis::Omega3}) {
        Spectrum1D p = project_1d(s, ax);
        for (int k = 0; k < g; ++k) {
            cplx sum = 0;
            for (int i = 0; i < g; ++i) {
                cplx v = ax == Axis::Omega1 ? s.values(i, 0) : s.values(0, i);
                sum += v * std::exp(cplx(0, -p.omega[k] * s.t1[i]));
            }
            CHECK(std::abs(sum - p.values[k]) < 1e-11);
        }
    }
}

TEST_CASE("line width of a damped tone") {
    // |S| of exp(-g t) is Lorentzian-like with FWHM = 2 sqrt(3) g in amplitude
    const int g = 256;
    const double dt = 20e-6, gamma = 2e3;
    SignalGrid s = make_grid(g, dt, [&](double a, double b) {
        return std::exp(-gamma * (a + b)) * tone(0, 0, a, b);
    });
    FftOptions o;
    o.zero_pad = 4;
    Spectrum2D sp = fft2(s, o);
    CHECK(sp.bin_width < 0.05 * gamma * 2 * std::sqrt(3.0));
    Eigen::Index r, c;
    sp.magnitude().maxCoeff(&r, &c);
    CHECK(fwhm(sp, int(r), int(c), Axis::Omega1) == Approx(2 * std::sqrt(3.0) * gamma).epsilon(0.05));
    CHECK(fwhm(sp, int(r), int(c), Axis::Omega3) == Approx(2 * std::sqrt(3.0) * gamma).epsilon(0.05));
}

TEST_CASE("peak helpers") {
    const int g = 32;
    const double dt = 10e-6, bin = two_pi / (g * dt);
    SignalGrid s = make_grid(g, dt, [&](double a, double b) {
        return tone(4 * bin, 4 * bin, a, b) + tone(-4 * bin, -4 * bin, a, b) +
               0.5 * tone(2 * bin, 0, a, b) + 0.01 * tone(-7 * bin, 9 * bin, a, b);
    });
    Spectrum2D sp = fft2(s);
    auto peaks = find_peaks(sp, 0.1);
    REQUIRE(peaks.size() == 3);
    CHECK(peaks[0].magnitude == Approx(g * g));
    CHECK(peaks[2].magnitude == Approx(0.5 * g * g));
    auto pairs = reflection_pairs(peaks, 0.0, 0.1 * bin);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair{0, 1});
    CHECK(reflection_pairs(peaks, bin, 0.1 * bin).empty());

    auto hist = diagonal_offsets(sp, 0.1);
    CHECK(hist[0] == 2);
    CHECK(hist[2] == 1);
    CHECK(hist.size() == 2);

    Eigen::VectorXd v(8);
    v << 0, 1, 0, 0.05, 0, 3, 3, 0;
    auto m = local_maxima(v, 0.1);
    REQUIRE(m.size() == 2);
    CHECK(m[0] == 1);
    CHECK(m[1] == 5);

    CHECK_THROWS(find_peaks(sp, 0.0));
    FftOptions bad;
    bad.zero_pad = 0;
    CHECK_THROWS(fft2(s, bad));
}
