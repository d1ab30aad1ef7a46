#pragma once

#include <complex>
#include <string>
#include <vector>

namespace oi {

using cd = std::complex<double>;

// Shared lattice geometry. Every grid in one computation uses the same dims.
//
// Index convention, used throughout the project:
//   first index  = Doppler index k (DD) or time slot n (TF), range 0..N-1
//   second index = delay index l (DD) or subcarrier m (TF), range 0..M-1
// Storage is row-major: element (i, j) lives at v[i * M + j].
struct GridDims {
    int n_slots = 0;        // N: Doppler bins / time slots
    int m_subcarriers = 0;  // M: delay bins / subcarriers

    int size() const { return n_slots * m_subcarriers; }
    bool operator==(const GridDims&) const = default;
};

struct ComplexGrid {
    GridDims dims;
    std::vector<cd> v;

    ComplexGrid() = default;
    explicit ComplexGrid(GridDims d) : dims(d), v(static_cast<size_t>(d.size())) {}

    cd& at(int i, int j) { return v[static_cast<size_t>(i) * dims.m_subcarriers + j]; }
    const cd& at(int i, int j) const {
        return v[static_cast<size_t>(i) * dims.m_subcarriers + j];
    }

    double frobenius_norm() const;
    bool all_finite() const;
};

// Delay-Doppler domain grid: at(k, l).
struct DDGrid : ComplexGrid {
    DDGrid() = default;
    explicit DDGrid(GridDims d) : ComplexGrid(d) {}
};

// Time-frequency domain grid: at(n, m).
struct TFGrid : ComplexGrid {
    TFGrid() = default;
    explicit TFGrid(GridDims d) : ComplexGrid(d) {}
};

// Real-valued grid (amplitudes, channel magnitudes, powers).
struct RealGrid {
    GridDims dims;
    std::vector<double> v;

    RealGrid() = default;
    explicit RealGrid(GridDims d, double fill = 0.0)
        : dims(d), v(static_cast<size_t>(d.size()), fill) {}

    double& at(int i, int j) { return v[static_cast<size_t>(i) * dims.m_subcarriers + j]; }
    double at(int i, int j) const {
        return v[static_cast<size_t>(i) * dims.m_subcarriers + j];
    }
};

// Inverse symplectic finite Fourier transform, DD -> TF:
//   X[n,m] = (1/sqrt(NM)) sum_k sum_l x[k,l] exp(+j2pi(nk/N - ml/M))
// Unitary, so Frobenius norms are preserved.
TFGrid isfft(const DDGrid& dd);

// Symplectic finite Fourier transform, TF -> DD; exact inverse of isfft:
//   x[k,l] = (1/sqrt(NM)) sum_n sum_m X[n,m] exp(-j2pi(nk/N - ml/M))
DDGrid sfft(const TFGrid& tf);

// JSON (de)serialization: {"n": N, "m": M, "values": [[re,im], ...]} row-major.
std::string grid_to_json(const ComplexGrid& g);
ComplexGrid grid_from_json(const std::string& text);

}  // namespace oi
