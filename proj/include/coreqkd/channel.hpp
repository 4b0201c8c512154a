// channel.hpp
// Two-channel transport of a block: Eve's interposition point followed by
// per-qubit depolarizing noise. Slots are equidistant; the channel never
// reorders either line.

#pragma once

#include <array>
#include <cstdint>

#include "adversary.hpp"
#include "block.hpp"
#include "random.hpp"

namespace coreqkd {

// With probability p the qubit is replaced by the maximally mixed state,
// realized as I, X, Y, Z each with probability p/4.
inline void depolarize(StateVector& reg, int qubit, double p, Rng& rng) {
    if (p <= 0.0) return;
    const double q = p / 4.0;
    const std::array<double, 4> w = {1.0 - 3.0 * q, q, q, q};
    apply_pauli(reg, qubit, static_cast<Pauli>(sample_index(rng, w)));
}

// Depolarizing error rate seen by a Bell measurement when both halves of a
// pair pass through the channel: the pair survives iff the two Pauli errors
// cancel on the Bell labels.
inline double depolarized_pair_error(double p) {
    const double id = 1.0 - 0.75 * p;
    const double each = p / 4.0;
    return 1.0 - (id * id + 3.0 * each * each);
}

inline Block transmit(Block block, Eavesdropper* eve, std::uint64_t block_index, double noise,
                      Rng& rng) {
    require(noise >= 0.0 && noise <= 1.0, "noise must be in [0, 1]");
    if (eve != nullptr) eve->intercept(block, block_index, rng);
    if (noise > 0.0)
        for (int q = 0; q < block.reg.n_qubits(); ++q) depolarize(block.reg, q, noise, rng);
    return block;
}

}  // namespace coreqkd
