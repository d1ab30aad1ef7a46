#include "grid.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace oi {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Radix-2 in-place FFT, kernel exp(sign * j2pi/n), unnormalized.
void fft_pow2(std::vector<cd>& x, int sign) {
    const size_t n = x.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const cd u = x[i + j];
                const cd t = x[i + j + len / 2] * w;
                x[i + j] = u + t;
                x[i + j + len / 2] = u - t;
                w *= wlen;
            }
        }
    }
}

// Direct DFT for non power-of-two lengths; same kernel convention.
void dft_naive(std::vector<cd>& x, int sign) {
    const size_t n = x.size();
    std::vector<cd> out(n);
    for (size_t k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        for (size_t t = 0; t < n; ++t) {
            const double ang = sign * kTwoPi * static_cast<double>(k * t % n) /
                               static_cast<double>(n);
            acc += x[t] * cd(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    x = std::move(out);
}

void transform_1d(std::vector<cd>& x, int sign) {
    if (x.size() <= 1) return;
    if (is_pow2(x.size())) {
        fft_pow2(x, sign);
    } else {
        dft_naive(x, sign);
    }
}

// Applies a length-N transform along the first index (sign s0) and a
// length-M transform along the second index (sign s1), then scales by
// 1/sqrt(NM).
ComplexGrid separable_transform(const ComplexGrid& g, int s0, int s1) {
    const int n = g.dims.n_slots;
    const int m = g.dims.m_subcarriers;
    ComplexGrid out(g.dims);
    out.v = g.v;

    std::vector<cd> col(static_cast<size_t>(n));
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) col[static_cast<size_t>(i)] = out.at(i, j);
        transform_1d(col, s0);
        for (int i = 0; i < n; ++i) out.at(i, j) = col[static_cast<size_t>(i)];
    }
    std::vector<cd> row(static_cast<size_t>(m));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) row[static_cast<size_t>(j)] = out.at(i, j);
        transform_1d(row, s1);
        for (int j = 0; j < m; ++j) out.at(i, j) = row[static_cast<size_t>(j)];
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(n) * m);
    for (auto& z : out.v) z *= scale;
    return out;
}

}  // namespace

double ComplexGrid::frobenius_norm() const {
    double acc = 0.0;
    for (const auto& z : v) acc += std::norm(z);
    return std::sqrt(acc);
}

bool ComplexGrid::all_finite() const {
    for (const auto& z : v) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

TFGrid isfft(const DDGrid& dd) {
    TFGrid out(dd.dims);
    static_cast<ComplexGrid&>(out) = separable_transform(dd, +1, -1);
    return out;
}

DDGrid sfft(const TFGrid& tf) {
    DDGrid out(tf.dims);
    static_cast<ComplexGrid&>(out) = separable_transform(tf, -1, +1);
    return out;
}

std::string grid_to_json(const ComplexGrid& g) {
    nlohmann::json j;
    j["n"] = g.dims.n_slots;
    j["m"] = g.dims.m_subcarriers;
    auto& vals = j["values"] = nlohmann::json::array();
    for (const auto& z : g.v) vals.push_back({z.real(), z.imag()});
    return j.dump();
}

ComplexGrid grid_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    GridDims dims{j.at("n").get<int>(), j.at("m").get<int>()};
    if (dims.n_slots < 1 || dims.m_subcarriers < 1)
        throw std::invalid_argument("grid_from_json: dims must be >= 1");
    ComplexGrid g(dims);
    const auto& vals = j.at("values");
    if (static_cast<int>(vals.size()) != dims.size())
        throw std::invalid_argument("grid_from_json: value count does not match dims");
    for (int i = 0; i < dims.size(); ++i) {
        g.v[static_cast<size_t>(i)] = cd(vals[i][0].get<double>(), vals[i][1].get<double>());
    }
    return g;
}

}  // namespace oi
