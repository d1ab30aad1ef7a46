#include <cmath>

#include "doctest.h"
#include "grid.hpp"
#include "rng.hpp"

using namespace oi;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

DDGrid random_dd(GridDims dims, Rng& rng) {
    DDGrid g(dims);
    for (auto& z : g.v) z = rng.complex_gaussian(1.0);
    return g;
}

// Independent oracle: direct O(N^2 M^2) evaluation of the transform
// definition, no shared code with the implementation.
TFGrid isfft_oracle(const DDGrid& dd) {
    const int n = dd.dims.n_slots, m = dd.dims.m_subcarriers;
    TFGrid out(dd.dims);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n) * m);
    for (int nn = 0; nn < n; ++nn)
        for (int mm = 0; mm < m; ++mm) {
            cd acc(0, 0);
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < m; ++l) {
                    const double ang = kTwoPi * (static_cast<double>(nn) * k / n -
                                                 static_cast<double>(mm) * l / m);
                    acc += dd.at(k, l) * std::polar(1.0, ang);
                }
            out.at(nn, mm) = scale * acc;
        }
    return out;
}

DDGrid sfft_oracle(const TFGrid& tf) {
    const int n = tf.dims.n_slots, m = tf.dims.m_subcarriers;
    DDGrid out(tf.dims);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n) * m);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < m; ++l) {
            cd acc(0, 0);
            for (int nn = 0; nn < n; ++nn)
                for (int mm = 0; mm < m; ++mm) {
                    const double ang = -kTwoPi * (static_cast<double>(nn) * k / n -
                                                  static_cast<double>(mm) * l / m);
                    acc += tf.at(nn, mm) * std::polar(1.0, ang);
                }
            out.at(k, l) = scale * acc;
        }
    return out;
}

double max_err(const ComplexGrid& a, const ComplexGrid& b) {
    double mx = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) mx = std::max(mx, std::abs(a.v[i] - b.v[i]));
    return mx;
}

}  // namespace

TEST_CASE("isfft of a 2x2 impulse is flat") {
    DDGrid g(GridDims{2, 2});
    g.at(0, 0) = cd(1, 0);
    const TFGrid x = isfft(g);
    for (const auto& z : x.v) {
        CHECK(z.real() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(std::abs(z.imag()) < 1e-14);
    }
}

TEST_CASE("sfft of a flat 2x2 grid is an impulse") {
    TFGrid x(GridDims{2, 2});
    for (auto& z : x.v) z = cd(0.5, 0);
    const DDGrid g = sfft(x);
    CHECK(std::abs(g.at(0, 0) - cd(1, 0)) < 1e-14);
    CHECK(std::abs(g.at(0, 1)) < 1e-14);
    CHECK(std::abs(g.at(1, 0)) < 1e-14);
    CHECK(std::abs(g.at(1, 1)) < 1e-14);
}

TEST_CASE("transforms match the double-sum oracle") {
    Rng rng(101);
    for (GridDims dims : {GridDims{12, 12}, GridDims{5, 7}, GridDims{8, 4}, GridDims{1, 3}}) {
        const DDGrid g = random_dd(dims, rng);
        CHECK(max_err(isfft(g), isfft_oracle(g)) < 1e-10);
        TFGrid tf(dims);
        for (auto& z : tf.v) z = rng.complex_gaussian(1.0);
        CHECK(max_err(sfft(tf), sfft_oracle(tf)) < 1e-10);
    }
}

TEST_CASE("round trip and Parseval") {
    Rng rng(102);
    for (int rep = 0; rep < 20; ++rep) {
        const DDGrid g = random_dd(GridDims{12, 12}, rng);
        const TFGrid x = isfft(g);
        CHECK(std::abs(x.frobenius_norm() - g.frobenius_norm()) < 1e-12);
        CHECK(max_err(sfft(x), g) < 1e-10);
        const DDGrid d = sfft(x);
        CHECK(max_err(isfft(d), x) < 1e-10);
    }
}

TEST_CASE("isfft is linear") {
    Rng rng(103);
    const GridDims dims{6, 9};
    const DDGrid g1 = random_dd(dims, rng);
    const DDGrid g2 = random_dd(dims, rng);
    const cd a(1.3, -0.2), b(-0.4, 2.1);
    DDGrid mix(dims);
    for (size_t i = 0; i < mix.v.size(); ++i) mix.v[i] = a * g1.v[i] + b * g2.v[i];
    const TFGrid lhs = isfft(mix);
    const TFGrid x1 = isfft(g1);
    const TFGrid x2 = isfft(g2);
    double mx = 0.0;
    for (size_t i = 0; i < lhs.v.size(); ++i)
        mx = std::max(mx, std::abs(lhs.v[i] - (a * x1.v[i] + b * x2.v[i])));
    CHECK(mx < 1e-10);
}

TEST_CASE("grid JSON round trip is exact") {
    Rng rng(104);
    const DDGrid g = random_dd(GridDims{3, 5}, rng);
    const ComplexGrid back = grid_from_json(grid_to_json(g));
    REQUIRE(back.dims == g.dims);
    for (size_t i = 0; i < g.v.size(); ++i) CHECK(back.v[i] == g.v[i]);

    CHECK_THROWS_AS(grid_from_json("{\"n\":2,\"m\":2,\"values\":[[1,0]]}"),
                    std::invalid_argument);
}
