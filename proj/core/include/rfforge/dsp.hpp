#pragma once

#include <array>
#include <span>
#include <vector>

#include "rfforge/sigcore.hpp"

namespace rfforge::dsp {

/// Support of the fractional-delay interpolation kernel, in samples.
inline constexpr int kInterpWidth = 16;
inline constexpr int kInterpHalfWidth = kInterpWidth / 2;

double sinc(double x) noexcept;
double bessel_i0(double x) noexcept;
/// Kaiser window evaluated at u in [-1, 1]; zero outside.
double kaiser(double u, double beta) noexcept;

/// Kaiser-windowed sinc interpolation kernel, evaluated directly.
/// Nonzero for |u| < kInterpHalfWidth.
double interp_kernel(double u) noexcept;

/// Taps for reconstructing x(i + mu), mu in [0, 1), from x[i-7] .. x[i+8].
/// Served from a precomputed polyphase table with linear interpolation
/// between adjacent phases.
std::array<double, kInterpWidth> interp_taps(double mu) noexcept;

/// Band-limited reconstruction of x at fractional index t. Samples outside
/// [0, size) are treated as zero.
Complex interpolate(std::span<const Complex> x, double t) noexcept;

/// Full linear convolution of a complex signal with real taps.
Waveform convolve(std::span<const Complex> x, std::span<const double> h);
/// Full linear convolution of a real signal with real taps.
std::vector<double> convolve(std::span<const double> x, std::span<const double> h);

/// Linear-phase lowpass (odd length), cutoff in cycles/sample, unit DC gain.
std::vector<double> lowpass_taps(double cutoff, int n_taps, double kaiser_beta = 8.0);
/// Windowed ideal Hilbert transformer (odd length, group delay (n_taps-1)/2).
std::vector<double> hilbert_taps(int n_taps, double kaiser_beta = 8.0);

}  // namespace rfforge::dsp
