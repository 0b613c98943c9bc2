#include "ionspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "ionspec/crystal.hpp"
#include "ionspec/diagnostics.hpp"

namespace ionspec {

namespace {

// FFTW planning is not thread-safe.
std::mutex g_plan_mutex;

int wrap(int i, int n) { return ((i % n) + n) % n; }

Eigen::VectorXd window_weights(int n, Window w) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    if (w == Window::Cosine && n > 1)
        for (int i = 0; i < n; ++i) v[i] = std::cos(0.5 * constants::pi * i / n);
    return v;
}

// In-place forward DFT of a column-major rows x cols array.
void dft(CMat& a) {
    const int rows = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    // FFTW expects row-major; transform the transpose layout instead.
    auto* data = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        if (rows == 1 || cols == 1)
            plan = fftw_plan_dft_1d(rows * cols, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
        else
            plan = fftw_plan_dft_2d(cols, rows, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
}

CMat shift(const CMat& a) {
    const int r = static_cast<int>(a.rows());
    const int c = static_cast<int>(a.cols());
    CMat out(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) out(wrap(i + r / 2, r), wrap(j + c / 2, c)) = a(i, j);
    return out;
}

Eigen::VectorXd axis(int n, double bin, double offset) {
    Eigen::VectorXd w(n);
    for (int k = 0; k < n; ++k) w[k] = offset + (k - n / 2) * bin;
    return w;
}

}  // namespace

Spectrum2D fft2(const SignalGrid& grid, const FftOptions& opts) {
    if (opts.zero_pad < 1) throw Error("spectrum", "zero_pad must be >= 1");
    const int g1 = static_cast<int>(grid.values.rows());
    const int g3 = static_cast<int>(grid.values.cols());
    if (g1 != g3) throw Error("spectrum", "square grids only");
    const int n = g1 * opts.zero_pad;
    Eigen::VectorXd w = window_weights(g1, opts.window);
    CMat buf = CMat::Zero(n, n);
    buf.topLeftCorner(g1, g3) = w.asDiagonal() * grid.values * w.asDiagonal();
    dft(buf);

    Spectrum2D s;
    s.values = shift(buf);
    s.bin_width = 2 * constants::pi / (n * grid.dt);
    s.carrier_offset = opts.carrier_offset;
    s.zero_bin = n / 2;
    s.omega1 = axis(n, s.bin_width, opts.carrier_offset);
    s.omega3 = s.omega1;
    if (opts.notch_carrier) s.values(s.zero_bin, s.zero_bin) = 0;
    return s;
}

Spectrum1D project_1d(const SignalGrid& grid, Axis ax, const FftOptions& opts) {
    const int g = static_cast<int>(grid.values.rows());
    const int n = g * std::max(1, opts.zero_pad);
    Eigen::VectorXd w = window_weights(g, opts.window);
    CMat buf = CMat::Zero(n, 1);
    if (ax == Axis::Omega1)
        buf.col(0).head(g) = w.cast<cplx>().cwiseProduct(grid.values.col(0));
    else
        buf.col(0).head(g) = w.cast<cplx>().cwiseProduct(grid.values.row(0).transpose());
    dft(buf);
    Spectrum1D out;
    out.bin_width = 2 * constants::pi / (n * grid.dt);
    out.omega = axis(n, out.bin_width, opts.carrier_offset);
    out.values = shift(buf).col(0);
    if (opts.notch_carrier) out.values[n / 2] = 0;
    return out;
}

std::vector<Peak> find_peaks(const Spectrum2D& spec, double threshold) {
    if (!(threshold > 0 && threshold < 1)) throw Error("spectrum", "threshold must be in (0,1)");
    Eigen::MatrixXd mag = spec.magnitude();
    const int r = static_cast<int>(mag.rows());
    const int c = static_cast<int>(mag.cols());
    const double cut = threshold * mag.maxCoeff();
    std::vector<Peak> peaks;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
            double v = mag(i, j);
            if (v < cut || v <= 0) continue;
            bool is_max = true;
            double sw = 0, s1 = 0, s3 = 0;
            for (int di = -1; di <= 1 && is_max; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    double u = mag(wrap(i + di, r), wrap(j + dj, c));
                    if ((di || dj) && (u > v || (u == v && (di < 0 || (di == 0 && dj < 0))))) {
                        is_max = false;
                        break;
                    }
                    sw += u;
                    s1 += u * di;
                    s3 += u * dj;
                }
            if (!is_max) continue;
            Peak p;
            p.i1 = i;
            p.i3 = j;
            p.magnitude = v;
            p.omega1 = spec.omega1[i] + spec.bin_width * s1 / sw;
            p.omega3 = spec.omega3[j] + spec.bin_width * s3 / sw;
            peaks.push_back(p);
        }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
    return peaks;
}

std::vector<std::pair<int, int>> reflection_pairs(const std::vector<Peak>& peaks,
                                                  double carrier, double tol) {
    std::vector<std::pair<int, int>> out;
    for (std::size_t a = 0; a < peaks.size(); ++a)
        for (std::size_t b = a + 1; b < peaks.size(); ++b) {
            double e1 = peaks[a].omega1 + peaks[b].omega1 - 2 * carrier;
            double e3 = peaks[a].omega3 + peaks[b].omega3 - 2 * carrier;
            if (std::abs(e1) <= tol && std::abs(e3) <= tol)
                out.push_back({static_cast<int>(a), static_cast<int>(b)});
        }
    return out;
}

double fwhm(const Spectrum2D& spec, int i1, int i3, Axis ax) {
    Eigen::MatrixXd mag = spec.magnitude();
    const int n = static_cast<int>(ax == Axis::Omega1 ? mag.rows() : mag.cols());
    auto at = [&](int k) {
        return ax == Axis::Omega1 ? mag(wrap(i1 + k, n), i3) : mag(i1, wrap(i3 + k, n));
    };
    const double half = 0.5 * at(0);
    double width = 0;
    for (int dir : {-1, 1}) {
        int k = 0;
        while (std::abs(k) < n / 2 && at(k + dir) >= half) k += dir;
        double a = at(k), b = at(k + dir);
        double frac = (a - half) / std::max(a - b, 1e-300);
        width += std::abs(k) + std::clamp(frac, 0.0, 1.0);
    }
    return width * spec.bin_width;
}

std::map<int, int> diagonal_offsets(const Spectrum2D& spec, double threshold) {
    Eigen::MatrixXd mag = spec.magnitude();
    const int n = static_cast<int>(mag.rows());
    const double cut = threshold * mag.maxCoeff();
    std::map<int, int> hist;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mag(i, j) >= cut) {
                int off = wrap(j - i + n / 2, n) - n / 2;
                hist[off] += 1;
            }
    return hist;
}

std::vector<int> local_maxima(const Eigen::VectorXd& mag, double threshold) {
    const int n = static_cast<int>(mag.size());
    const double cut = threshold * mag.maxCoeff();
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
        double v = mag[i];
        if (v < cut || v <= 0) continue;
        if (v > mag[wrap(i - 1, n)] && v >= mag[wrap(i + 1, n)]) out.push_back(i);
    }
    return out;
}

double time_energy(const SignalGrid& grid) { return grid.values.squaredNorm(); }

double spectral_energy(const Spectrum2D& spec) {
    return spec.values.squaredNorm() / double(spec.values.rows() * spec.values.cols());
}

}  // namespace ionspec
