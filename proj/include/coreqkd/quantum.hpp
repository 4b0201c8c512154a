// quantum.hpp
// Exact dense state algebra for small registers: Bell states, Pauli-direction
// observables, reduced density matrices and projective measurement.
//
// Basis ordering is big-endian by qubit index: qubit 0 is the most
// significant bit of the amplitude index. For a two-qubit state the order is
// |00>, |01>, |10>, |11> with the first factor on qubit 0.

#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace coreqkd {

using Complex = std::complex<double>;

inline constexpr double kExactTol = 1e-12;
inline constexpr double kNormTol = 1e-10;
inline constexpr int kMaxQubits = 8;

// ---------------------------------------------------------------------------
// Bell symbols

enum class BellSymbol : std::uint8_t { PsiMinus = 0, PsiPlus = 1, PhiMinus = 2, PhiPlus = 3 };

inline constexpr std::array<BellSymbol, 4> kAllBellSymbols = {
    BellSymbol::PsiMinus, BellSymbol::PsiPlus, BellSymbol::PhiMinus, BellSymbol::PhiPlus};

// 2-bit key value: PsiMinus->00, PsiPlus->01, PhiMinus->10, PhiPlus->11.
constexpr unsigned key_bits(BellSymbol s) noexcept { return static_cast<unsigned>(s); }

constexpr BellSymbol symbol_from_bits(unsigned bits) {
    if (bits > 3) throw Error(ErrorCode::InvalidArgument, "Bell key value out of range");
    return static_cast<BellSymbol>(bits);
}

constexpr std::string_view to_string(BellSymbol s) noexcept {
    switch (s) {
        case BellSymbol::PsiMinus: return "psi-";
        case BellSymbol::PsiPlus: return "psi+";
        case BellSymbol::PhiMinus: return "phi-";
        case BellSymbol::PhiPlus: return "phi+";
    }
    return "?";
}

// Amplitudes of the Bell state in the two-qubit computational basis.
inline std::array<Complex, 4> bell_amplitudes(BellSymbol s) noexcept {
    const double h = 1.0 / std::sqrt(2.0);
    switch (s) {
        case BellSymbol::PsiMinus: return {0.0, h, -h, 0.0};
        case BellSymbol::PsiPlus: return {0.0, h, h, 0.0};
        case BellSymbol::PhiMinus: return {h, 0.0, 0.0, -h};
        case BellSymbol::PhiPlus: return {h, 0.0, 0.0, h};
    }
    return {};
}

// ---------------------------------------------------------------------------
// State vectors

class StateVector {
public:
    // |0...0> on n qubits.
    explicit StateVector(int n_qubits) : n_(check_size(n_qubits)), amps_(std::size_t{1} << n_) {
        amps_[0] = 1.0;
    }

    StateVector(int n_qubits, std::vector<Complex> amps)
        : n_(check_size(n_qubits)), amps_(std::move(amps)) {
        require(amps_.size() == (std::size_t{1} << n_), "amplitude vector length must be 2^n");
        const double nrm = norm();
        require(nrm > kNormTol, "zero state vector");
        for (auto& a : amps_) a /= nrm;
    }

    static StateVector basis(int n_qubits, std::size_t index) {
        StateVector s(n_qubits);
        require(index < s.dim(), "basis index out of range");
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    int n_qubits() const noexcept { return n_; }
    std::size_t dim() const noexcept { return amps_.size(); }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }

    // Bit mask of a qubit in the amplitude index.
    std::size_t mask(int qubit) const {
        require(qubit >= 0 && qubit < n_, "qubit index out of range");
        return std::size_t{1} << (n_ - 1 - qubit);
    }

    double norm() const noexcept {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    // Apply a 2x2 matrix (row-major) to one qubit.
    void apply_1q(const std::array<Complex, 4>& m, int qubit) {
        const std::size_t bit = mask(qubit);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) continue;
            const Complex a0 = amps_[i];
            const Complex a1 = amps_[i | bit];
            amps_[i] = m[0] * a0 + m[1] * a1;
            amps_[i | bit] = m[2] * a0 + m[3] * a1;
        }
    }

    friend StateVector tensor(const StateVector& a, const StateVector& b);
    friend class PairView;

private:
    static int check_size(int n) {
        require(n >= 1 && n <= kMaxQubits, "register size must be 1..8 qubits");
        return n;
    }

    // Unchecked construction for already-normalized data.
    struct Raw {};
    StateVector(Raw, int n, std::vector<Complex> amps) : n_(n), amps_(std::move(amps)) {}

    int n_;
    std::vector<Complex> amps_;
};

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    const int n = a.n_qubits() + b.n_qubits();
    require(n <= kMaxQubits, "tensor product exceeds the 8-qubit register cap");
    std::vector<Complex> out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a.amps_[i] * b.amps_[j];
    return StateVector(StateVector::Raw{}, n, std::move(out));
}

inline Complex inner(const StateVector& a, const StateVector& b) {
    require(a.n_qubits() == b.n_qubits(), "inner product of registers of different size");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline StateVector bell_state(BellSymbol s) {
    const auto a = bell_amplitudes(s);
    return StateVector(2, std::vector<Complex>(a.begin(), a.end()));
}

// Access to the 4-dimensional slices of a register over an ordered qubit pair
// (i, j): for every assignment of the remaining qubits, the amplitudes of
// |00>,|01>,|10>,|11> on (i, j).
class PairView {
public:
    PairView(const StateVector& reg, int qi, int qj) : reg_(&reg) {
        require(reg.n_qubits() >= 2, "pair operations need at least 2 qubits");
        require(qi != qj, "pair qubits must differ");
        mi_ = reg.mask(qi);
        mj_ = reg.mask(qj);
        for (std::size_t r = 0; r < reg.dim(); ++r)
            if (!(r & mi_) && !(r & mj_)) bases_.push_back(r);
    }

    std::size_t slices() const noexcept { return bases_.size(); }

    std::array<std::size_t, 4> indices(std::size_t slice) const {
        const std::size_t b = bases_[slice];
        return {b, b | mj_, b | mi_, b | mi_ | mj_};
    }

    std::array<Complex, 4> slice(std::size_t s) const {
        const auto idx = indices(s);
        return {reg_->amps_[idx[0]], reg_->amps_[idx[1]], reg_->amps_[idx[2]], reg_->amps_[idx[3]]};
    }

    // Replace every slice by f(slice) and renormalize.
    template <class F>
    StateVector map(F&& f) const {
        std::vector<Complex> out(reg_->dim());
        for (std::size_t s = 0; s < bases_.size(); ++s) {
            const auto idx = indices(s);
            const auto v = f(slice(s));
            for (int k = 0; k < 4; ++k) out[idx[k]] = v[k];
        }
        double nrm = 0.0;
        for (const auto& a : out) nrm += std::norm(a);
        nrm = std::sqrt(nrm);
        if (!(nrm > kNormTol))
            throw Error(ErrorCode::Internal, "degenerate post-measurement state");
        for (auto& a : out) a /= nrm;
        return StateVector(StateVector::Raw{}, reg_->n_qubits(), std::move(out));
    }

private:
    const StateVector* reg_;
    std::size_t mi_ = 0, mj_ = 0;
    std::vector<std::size_t> bases_;
};

// ---------------------------------------------------------------------------
// Directions and Pauli observables

class Direction {
public:
    Direction(double x, double y, double z) : x_(x), y_(y), z_(z) {
        const double n2 = x * x + y * y + z * z;
        if (std::abs(n2 - 1.0) > 1e-9)
            throw Error(ErrorCode::InvalidArgument, "direction is not a unit vector");
        const double n = std::sqrt(n2);
        x_ /= n;
        y_ /= n;
        z_ /= n;
    }

    static Direction normalized(double x, double y, double z) {
        const double n = std::sqrt(x * x + y * y + z * z);
        require(n > 0.0, "cannot normalize the zero vector");
        return Direction(x / n, y / n, z / n);
    }

    static Direction x_axis() { return {1.0, 0.0, 0.0}; }
    static Direction y_axis() { return {0.0, 1.0, 0.0}; }
    static Direction z_axis() { return {0.0, 0.0, 1.0}; }

    // Uniform on the sphere.
    static Direction random(Rng& rng) {
        const double z = 2.0 * uniform01(rng) - 1.0;
        const double phi = 2.0 * std::numbers::pi * uniform01(rng);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return normalized(r * std::cos(phi), r * std::sin(phi), z);
    }

    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }
    double z() const noexcept { return z_; }

    double dot(const Direction& o) const noexcept { return x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }

private:
    double x_, y_, z_;
};


// Row-major square matrix over Complex.
template <std::size_t N>
using Matrix = std::array<Complex, N * N>;

using Mat2 = Matrix<2>;
using Mat4 = Matrix<4>;

template <std::size_t N>
Matrix<N> adjoint(const Matrix<N>& m) {
    Matrix<N> out{};
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) out[c * N + r] = std::conj(m[r * N + c]);
    return out;
}

template <std::size_t N>
Matrix<N> multiply(const Matrix<N>& a, const Matrix<N>& b) {
    Matrix<N> out{};
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t c = 0; c < N; ++c) out[r * N + c] += a[r * N + k] * b[k * N + c];
    return out;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 out{};
    for (std::size_t r1 = 0; r1 < 2; ++r1)
        for (std::size_t c1 = 0; c1 < 2; ++c1)
            for (std::size_t r2 = 0; r2 < 2; ++r2)
                for (std::size_t c2 = 0; c2 < 2; ++c2)
                    out[(2 * r1 + r2) * 4 + (2 * c1 + c2)] = a[r1 * 2 + c1] * b[r2 * 2 + c2];
    return out;
}

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline Mat2 pauli_matrix(Pauli p) {
    using namespace std::complex_literals;
    switch (p) {
        case Pauli::I: return {1.0, 0.0, 0.0, 1.0};
        case Pauli::X: return {0.0, 1.0, 1.0, 0.0};
        case Pauli::Y: return {0.0, -1i, 1i, 0.0};
        case Pauli::Z: return {1.0, 0.0, 0.0, -1.0};
    }
    return {};
}

inline void apply_pauli(StateVector& reg, int qubit, Pauli p) {
    if (p == Pauli::I) return;
    reg.apply_1q(pauli_matrix(p), qubit);
}

// sigma . n = n_x X + n_y Y + n_z Z
inline Mat2 pauli_along(const Direction& n) {
    const auto x = pauli_matrix(Pauli::X), y = pauli_matrix(Pauli::Y), z = pauli_matrix(Pauli::Z);
    Mat2 out{};
    for (std::size_t k = 0; k < 4; ++k) out[k] = n.x() * x[k] + n.y() * y[k] + n.z() * z[k];
    return out;
}

// (sigma . a) (x) (sigma . b), a on the first qubit.
inline Mat4 correlation_operator(const Direction& a, const Direction& b) {
    return kron(pauli_along(a), pauli_along(b));
}

// ---------------------------------------------------------------------------
// Density matrices

class DensityMatrix {
public:
    // Validates Hermiticity and unit trace; positivity is checked by
    // is_positive_semidefinite() where callers need it.
    DensityMatrix(std::size_t dim, std::vector<Complex> entries)
        : dim_(dim), entries_(std::move(entries)) {
        require(dim_ == 2 || dim_ == 4, "density matrix dimension must be 2 or 4");
        require(entries_.size() == dim_ * dim_, "density matrix entry count mismatch");
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c)
                require(std::abs((*this)(r, c) - std::conj((*this)(c, r))) <= kExactTol,
                        "density matrix is not Hermitian");
        require(std::abs(trace() - 1.0) <= kExactTol, "density matrix trace is not 1");
    }

    static DensityMatrix pure(const StateVector& psi) {
        require(psi.n_qubits() <= 2, "pure(): only 1- or 2-qubit states");
        const std::size_t d = psi.dim();
        std::vector<Complex> e(d * d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) e[r * d + c] = psi[r] * std::conj(psi[c]);
        return DensityMatrix(d, std::move(e));
    }

    std::size_t dim() const noexcept { return dim_; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
    std::span<const Complex> entries() const noexcept { return entries_; }

    double trace() const {
        Complex t = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) t += (*this)(k, k);
        return t.real();
    }

    // Cholesky of rho + tol*I succeeds iff every eigenvalue is >= -tol.
    bool is_positive_semidefinite(double tol = 1e-10) const {
        const std::size_t n = dim_;
        std::vector<Complex> l(n * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            Complex s = (*this)(j, j) + tol;
            for (std::size_t k = 0; k < j; ++k) s -= l[j * n + k] * std::conj(l[j * n + k]);
            if (s.real() < 0.0) return false;
            const double d = std::sqrt(std::max(s.real(), 0.0));
            l[j * n + j] = d;
            for (std::size_t i = j + 1; i < n; ++i) {
                Complex t = (*this)(i, j);
                for (std::size_t k = 0; k < j; ++k) t -= l[i * n + k] * std::conj(l[j * n + k]);
                l[i * n + j] = d > 0.0 ? t / d : Complex(0.0);
            }
        }
        return true;
    }

private:
    std::size_t dim_;
    std::vector<Complex> entries_;
};

namespace detail {

// Trace out every qubit not in `keep` from an n-qubit density matrix given as
// a dense row-major array. Kept qubits retain their relative order.
inline std::vector<Complex> trace_keep(std::span<const Complex> rho, int n,
                                       std::span<const int> keep) {
    const std::size_t dim = std::size_t{1} << n;
    const int k = static_cast<int>(keep.size());
    const std::size_t kdim = std::size_t{1} << k;
    auto bit = [n](int q) { return std::size_t{1} << (n - 1 - q); };
    std::size_t keep_mask = 0;
    for (int q : keep) keep_mask |= bit(q);
    auto reduced_index = [&](std::size_t full) {
        std::size_t idx = 0;
        for (int q : keep) idx = (idx << 1) | ((full & bit(q)) ? 1u : 0u);
        return idx;
    };
    std::vector<Complex> out(kdim * kdim, 0.0);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            if ((r & ~keep_mask) == (c & ~keep_mask))
                out[reduced_index(r) * kdim + reduced_index(c)] += rho[r * dim + c];
    return out;
}

}  // namespace detail

enum class Keep { First, Second };

inline DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep) {
    require(rho.dim() == 4, "partial_trace expects a two-qubit density matrix");
    const int q = keep == Keep::First ? 0 : 1;
    return DensityMatrix(2, detail::trace_keep(rho.entries(), 2, std::span<const int>(&q, 1)));
}

// Reduced density matrix of one or two qubits of a pure register.
inline DensityMatrix reduced_density(const StateVector& reg, std::span<const int> qubits) {
    require(qubits.size() == 1 || qubits.size() == 2, "reduced_density keeps 1 or 2 qubits");
    const std::size_t kdim = std::size_t{1} << qubits.size();
    std::size_t keep_mask = 0;
    for (int q : qubits) keep_mask |= reg.mask(q);
    auto reduced_index = [&](std::size_t full) {
        std::size_t idx = 0;
        for (int q : qubits) idx = (idx << 1) | ((full & reg.mask(q)) ? 1u : 0u);
        return idx;
    };
    std::vector<Complex> out(kdim * kdim, 0.0);
    // rho_red(r, c) = sum over the rest of psi(r, rest) conj(psi(c, rest))
    for (std::size_t i = 0; i < reg.dim(); ++i) {
        if (reg[i] == Complex(0.0)) continue;
        const std::size_t rest = i & ~keep_mask;
        for (std::size_t j = 0; j < reg.dim(); ++j)
            if ((j & ~keep_mask) == rest)
                out[reduced_index(i) * kdim + reduced_index(j)] += reg[i] * std::conj(reg[j]);
    }
    return DensityMatrix(kdim, std::move(out));
}

inline DensityMatrix reduced_density(const StateVector& reg, std::initializer_list<int> qubits) {
    return reduced_density(reg, std::span<const int>(qubits.begin(), qubits.size()));
}

// Joint state of A from one pair and B from another, both pairs drawn
// independently and uniformly from `ensemble`. Computed by building the
// averaged two-pair density (A1,B1,A2,B2) and tracing out B1 and A2.
inline DensityMatrix mismatched_pair_density(std::span<const BellSymbol> ensemble) {
    require(!ensemble.empty(), "empty Bell ensemble");
    std::vector<Complex> pair(16, 0.0);
    const double w = 1.0 / static_cast<double>(ensemble.size());
    for (BellSymbol s : ensemble) {
        const auto v = bell_amplitudes(s);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) pair[r * 4 + c] += w * v[r] * std::conj(v[c]);
    }
    std::vector<Complex> joint(256, 0.0);
    for (std::size_t r1 = 0; r1 < 4; ++r1)
        for (std::size_t c1 = 0; c1 < 4; ++c1)
            for (std::size_t r2 = 0; r2 < 4; ++r2)
                for (std::size_t c2 = 0; c2 < 4; ++c2)
                    joint[(r1 * 4 + r2) * 16 + (c1 * 4 + c2)] = pair[r1 * 4 + c1] * pair[r2 * 4 + c2];
    constexpr std::array<int, 2> keep = {0, 3};
    return DensityMatrix(4, detail::trace_keep(joint, 4, keep));
}

inline DensityMatrix mismatched_pair_density() { return mismatched_pair_density(kAllBellSymbols); }

// ---------------------------------------------------------------------------
// Expectation values

inline double expectation(const StateVector& psi, const Direction& a, const Direction& b) {
    require(psi.n_qubits() == 2, "expectation expects a two-qubit state");
    const Mat4 e = correlation_operator(a, b);
    Complex s = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) s += std::conj(psi[r]) * e[r * 4 + c] * psi[c];
    return s.real();
}

inline double expectation(const DensityMatrix& rho, const Direction& a, const Direction& b) {
    require(rho.dim() == 4, "expectation expects a two-qubit density matrix");
    const Mat4 e = correlation_operator(a, b);
    Complex s = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) s += rho(r, c) * e[c * 4 + r];
    return s.real();
}

// ---------------------------------------------------------------------------
// Measurement

// Exact Born probabilities of the four Bell outcomes on qubits (i, j),
// indexed by key value.
inline std::array<double, 4> bell_probabilities(const StateVector& reg, int qi, int qj) {
    const PairView view(reg, qi, qj);
    std::array<double, 4> p{};
    for (BellSymbol s : kAllBellSymbols) {
        const auto b = bell_amplitudes(s);
        double acc = 0.0;
        for (std::size_t k = 0; k < view.slices(); ++k) {
            const auto v = view.slice(k);
            Complex o = 0.0;
            for (int t = 0; t < 4; ++t) o += std::conj(b[t]) * v[t];
            acc += std::norm(o);
        }
        p[key_bits(s)] = acc;
    }
    return p;
}

inline std::pair<BellSymbol, StateVector> bell_measure(const StateVector& reg, int qi, int qj,
                                                       Rng& rng) {
    const auto p = bell_probabilities(reg, qi, qj);
    const BellSymbol s = symbol_from_bits(static_cast<unsigned>(sample_index(rng, p)));
    const auto b = bell_amplitudes(s);
    const PairView view(reg, qi, qj);
    StateVector post = view.map([&](const std::array<Complex, 4>& v) {
        Complex o = 0.0;
        for (int t = 0; t < 4; ++t) o += std::conj(b[t]) * v[t];
        return std::array<Complex, 4>{b[0] * o, b[1] * o, b[2] * o, b[3] * o};
    });
    return {s, std::move(post)};
}

inline double prob_one(const StateVector& reg, int qubit) {
    const std::size_t bit = reg.mask(qubit);
    double p1 = 0.0;
    for (std::size_t i = 0; i < reg.dim(); ++i)
        if (i & bit) p1 += std::norm(reg[i]);
    return p1;
}

inline std::pair<int, StateVector> z_measure(const StateVector& reg, int qubit, Rng& rng) {
    const double p1 = prob_one(reg, qubit);
    const std::array<double, 2> w = {1.0 - p1, p1};
    const int bit = static_cast<int>(sample_index(rng, w));
    const std::size_t m = reg.mask(qubit);
    std::vector<Complex> out(reg.dim(), 0.0);
    if (!(w[bit] > 0.0)) throw Error(ErrorCode::Internal, "degenerate post-measurement state");
    const double scale = 1.0 / std::sqrt(w[bit]);
    for (std::size_t i = 0; i < reg.dim(); ++i)
        if (((i & m) != 0) == (bit == 1)) out[i] = reg[i] * scale;
    return {bit, StateVector(reg.n_qubits(), std::move(out))};
}

// Expectation of (sigma.a)(x)(sigma.b) on qubits (i, j) of a larger register.
inline double pair_expectation(const StateVector& reg, int qi, int qj, const Direction& a,
                               const Direction& b) {
    const Mat4 e = correlation_operator(a, b);
    const PairView view(reg, qi, qj);
    Complex s = 0.0;
    for (std::size_t k = 0; k < view.slices(); ++k) {
        const auto v = view.slice(k);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) s += std::conj(v[r]) * e[r * 4 + c] * v[c];
    }
    return s.real();
}

// Two-outcome measurement of (sigma.a)(x)(sigma.b) on qubits (i, j):
// projectors (I +- E)/2. Returns the eigenvalue and the collapsed register.
inline std::pair<int, StateVector> correlation_measure(const StateVector& reg, int qi, int qj,
                                                       const Direction& a, const Direction& b,
                                                       Rng& rng) {
    const double mean = std::clamp(pair_expectation(reg, qi, qj, a, b), -1.0, 1.0);
    const std::array<double, 2> w = {(1.0 + mean) / 2.0, (1.0 - mean) / 2.0};
    const int sign = sample_index(rng, w) == 0 ? +1 : -1;
    const Mat4 e = correlation_operator(a, b);
    const PairView view(reg, qi, qj);
    StateVector post = view.map([&](const std::array<Complex, 4>& v) {
        std::array<Complex, 4> out{};
        for (std::size_t r = 0; r < 4; ++r) {
            Complex ev = 0.0;
            for (std::size_t c = 0; c < 4; ++c) ev += e[r * 4 + c] * v[c];
            out[r] = 0.5 * (v[r] + static_cast<double>(sign) * ev);
        }
        return out;
    });
    return {sign, std::move(post)};
}

}  // namespace coreqkd
