// oracles.hpp
// Independent reference computations for the test suites. Nothing here
// calls into the routines it is used to check.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using M4 = std::array<std::array<C, 4>, 4>;

// Closed-form entries of (sigma.a)(x)(sigma.b), written out element by element.
inline M4 correlation_closed_form(double ax, double ay, double az, double bx, double by, double bz) {
    const C i(0.0, 1.0);
    const C am = ax - i * ay, ap = ax + i * ay;
    const C bm = bx - i * by, bp = bx + i * by;
    M4 e{};
    e[0] = {az * bz, az * bm, am * bz, am * bm};
    e[1] = {az * bp, -az * bz, am * bp, -am * bz};
    e[2] = {ap * bz, ap * bm, -az * bz, -az * bm};
    e[3] = {ap * bp, -ap * bz, -az * bp, az * bz};
    return e;
}

// Closed-form Bell-state correlations, in key order psi-, psi+, phi-, phi+.
inline std::array<double, 4> bell_correlations(double ax, double ay, double az, double bx, double by,
                                               double bz) {
    return {-(ax * bx + ay * by + az * bz), ax * bx + ay * by - az * bz, -ax * bx + ay * by + az * bz,
            ax * bx - ay * by + az * bz};
}

// Product states |00>,|01>,|10>,|11>.
inline std::array<double, 4> product_correlations(double az, double bz) {
    return {az * bz, -az * bz, -az * bz, az * bz};
}

// Direct 4x4 reduced state of one qubit of a two-qubit density matrix.
inline std::array<std::array<C, 2>, 2> trace_out(const M4& rho, bool keep_first) {
    std::array<std::array<C, 2>, 2> r{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k = 0; k < 2; ++k)
                r[a][b] += keep_first ? rho[2 * a + k][2 * b + k] : rho[2 * k + a][2 * k + b];
    return r;
}

// Bell vectors in key order.
inline std::array<std::array<C, 4>, 4> bell_vectors() {
    const double h = 1.0 / std::sqrt(2.0);
    return {{{0, h, -h, 0}, {0, h, h, 0}, {h, 0, 0, -h}, {h, 0, 0, h}}};
}

// Depolarizing pair error obtained by enumerating the 16 Pauli pairs and
// tracking how each one relabels the Bell state (X flips parity, Z flips
// phase, Y both).
inline double depolarized_pair_error_enumerated(double p) {
    const std::array<double, 4> w = {1.0 - 0.75 * p, p / 4, p / 4, p / 4};
    const std::array<int, 4> label = {0b00, 0b01, 0b11, 0b10};  // I, X, Y, Z
    double survive = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if ((label[a] ^ label[b]) == 0) survive += w[a] * w[b];
    return 1.0 - survive;
}

// Binomial lower tail P(X <= k), X ~ Bin(n, p), summed in log space.
inline double binomial_cdf(int k, int n, double p) {
    double total = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double lg = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                          j * std::log(p) + (n - j) * std::log1p(-p);
        total += std::exp(lg);
    }
    return total;
}

// Chi-square upper critical value at significance 0.001, 3 degrees of freedom.
inline constexpr double kChi2Df3Crit001 = 16.266;

}  // namespace oracle
