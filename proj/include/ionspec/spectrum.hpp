#pragma once

#include <map>
#include <string>
#include <vector>

#include "ionspec/protocol.hpp"

namespace ionspec {

enum class Window { None, Cosine };

struct FftOptions {
    Window window = Window::None;
    int zero_pad = 1;             // output length = zero_pad * points per axis
    double carrier_offset = 0;    // rad/s added to both axes
    bool notch_carrier = false;   // zero the bin at zero relative frequency
};

// Forward transform sum s(t1,t3) exp(-i w1 t1 - i w3 t3), zero frequency centered.
struct Spectrum2D {
    Eigen::VectorXd omega1, omega3;  // rad/s, carrier offset included
    CMat values;                     // rows omega1, cols omega3
    double bin_width = 0;            // rad/s after padding
    double carrier_offset = 0;
    int zero_bin = 0;                // index of zero relative frequency

    Eigen::MatrixXd magnitude() const { return values.cwiseAbs(); }
};

Spectrum2D fft2(const SignalGrid& grid, const FftOptions& opts = {});

enum class Axis { Omega1, Omega3 };

struct Spectrum1D {
    Eigen::VectorXd omega;
    CVec values;
    double bin_width = 0;
};

// Transform of the t3 = 0 column (Omega1) or the t1 = 0 row (Omega3).
Spectrum1D project_1d(const SignalGrid& grid, Axis axis, const FftOptions& opts = {});

struct Peak {
    double omega1 = 0, omega3 = 0;  // centroid, rad/s
    double magnitude = 0;
    int i1 = 0, i3 = 0;             // bin indices
    std::string label;
};

// Local maxima (3x3, periodic) above threshold * max, centroid refined,
// sorted by magnitude descending.
std::vector<Peak> find_peaks(const Spectrum2D& spec, double threshold);

// Pairs (i, j) of peaks mirrored through the carrier point within tol rad/s.
std::vector<std::pair<int, int>> reflection_pairs(const std::vector<Peak>& peaks,
                                                  double carrier, double tol);

// Full width at half maximum through bin (i1, i3) along one axis, rad/s.
// Linear interpolation between bins, periodic grid.
double fwhm(const Spectrum2D& spec, int i1, int i3, Axis axis);

// For bins above threshold * max: count per wrapped diagonal offset i3 - i1
// (in bins, folded into [-G/2, G/2)).
std::map<int, int> diagonal_offsets(const Spectrum2D& spec, double threshold);

// Local maxima of a 1D magnitude spectrum above threshold * max (periodic).
std::vector<int> local_maxima(const Eigen::VectorXd& mag, double threshold);

// Sum of |s|^2 over the grid and sum of |S|^2 / (G1 G3); equal for unwindowed,
// unpadded transforms.
double time_energy(const SignalGrid& grid);
double spectral_energy(const Spectrum2D& spec);

}  // namespace ionspec
