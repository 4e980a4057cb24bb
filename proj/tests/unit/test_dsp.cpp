#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rfforge/dsp.hpp"
#include "rfforge/random.hpp"

using namespace rfforge;

TEST_CASE("sinc is exact at integers") {
    CHECK(dsp::sinc(0.0) == 1.0);
    for (int k = 1; k < 20; ++k) {
        CHECK(dsp::sinc(k) == 0.0);
        CHECK(dsp::sinc(-k) == 0.0);
    }
    CHECK(dsp::sinc(0.5) == doctest::Approx(2.0 / std::numbers::pi));
}

TEST_CASE("bessel and kaiser") {
    CHECK(dsp::bessel_i0(0.0) == 1.0);
    CHECK(dsp::bessel_i0(1.0) == doctest::Approx(1.2660658777520082).epsilon(1e-13));
    CHECK(dsp::bessel_i0(5.0) == doctest::Approx(27.239871823604442).epsilon(1e-12));
    CHECK(dsp::kaiser(0.0, 8.6) == doctest::Approx(1.0));
    CHECK(dsp::kaiser(1.5, 8.6) == 0.0);
}

TEST_CASE("interpolation taps at zero phase are a unit impulse") {
    const auto t = dsp::interp_taps(0.0);
    for (int j = 0; j < dsp::kInterpWidth; ++j) CHECK(t[j] == (j == 7 ? 1.0 : 0.0));
}

TEST_CASE("polyphase table tracks the direct kernel") {
    for (double mu : {0.1, 0.2371, 0.5, 0.73, 0.999}) {
        const auto t = dsp::interp_taps(mu);
        for (int j = 0; j < dsp::kInterpWidth; ++j) {
            CHECK(std::abs(t[j] - dsp::interp_kernel(mu - (j - 7))) < 1e-6);
        }
    }
}

TEST_CASE("interpolate reconstructs a band-limited tone") {
    const double f = 0.05;
    Waveform x(512);
    for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::polar(1.0, 2 * std::numbers::pi * f * n);
    CHECK(dsp::interpolate(x, 100.0) == x[100]);
    RandomStream r(7, 0);
    for (int i = 0; i < 200; ++i) {
        const double t = r.uniform(50.0, 450.0);
        const auto want = std::polar(1.0, 2 * std::numbers::pi * f * t);
        CHECK(std::abs(dsp::interpolate(x, t) - want) < 2e-3);
    }
    CHECK(dsp::interpolate(x, -20.0) == Complex{});
    CHECK(dsp::interpolate(x, 600.0) == Complex{});
}

TEST_CASE("convolve matches the definition") {
    RandomStream r(8, 0);
    std::vector<double> a(13), h(5);
    for (double& v : a) v = r.normal();
    for (double& v : h) v = r.normal();
    const auto y = dsp::convolve(a, h);
    REQUIRE(y.size() == a.size() + h.size() - 1);
    for (std::size_t n = 0; n < y.size(); ++n) {
        double want = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (n >= k && n - k < a.size()) want += h[k] * a[n - k];
        }
        CHECK(y[n] == doctest::Approx(want).epsilon(1e-12));
    }
    Waveform ca(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ca[i] = Complex(a[i], -a[i]);
    const auto cy = dsp::convolve(ca, h);
    for (std::size_t n = 0; n < y.size(); ++n) CHECK(cy[n].imag() == doctest::Approx(-y[n]).epsilon(1e-12));
}

TEST_CASE("lowpass and hilbert designs") {
    const auto lp = dsp::lowpass_taps(0.05, 129);
    double dc = 0.0;
    for (double v : lp) dc += v;
    CHECK(dc == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < lp.size(); ++k) CHECK(lp[k] == doctest::Approx(lp[lp.size() - 1 - k]));

    const auto h = dsp::hilbert_taps(63);
    REQUIRE(h.size() == 63);
    CHECK(h[31] == 0.0);
    for (std::size_t k = 0; k < h.size(); ++k) CHECK(h[k] == doctest::Approx(-h[h.size() - 1 - k]));

    // A cosine through the Hilbert filter becomes a sine (after the group delay).
    std::vector<double> c(1024);
    const double f = 0.1;
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = std::cos(2 * std::numbers::pi * f * n);
    const auto y = dsp::convolve(c, dsp::hilbert_taps(255));
    for (std::size_t n = 300; n < 800; ++n) {
        CHECK(std::abs(y[n + 127] - std::sin(2 * std::numbers::pi * f * n)) < 1e-2);
    }
}
