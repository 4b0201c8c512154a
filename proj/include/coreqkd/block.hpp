// block.hpp
// One CORE block in flight: the joint register of its EPR pairs plus the
// slot-to-qubit mapping on each channel.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core_ops.hpp"
#include "quantum.hpp"

namespace coreqkd {

// Register layout: pair k occupies qubits 2k (upper part, A_k) and 2k+1
// (lower part, B_k).
constexpr int upper_qubit(int pair) noexcept { return 2 * pair; }
constexpr int lower_qubit(int pair) noexcept { return 2 * pair + 1; }

inline StateVector prepare_pairs(std::span<const BellSymbol> symbols) {
    require(!symbols.empty() && symbols.size() <= kMaxQubits / 2, "1..4 pairs per register");
    StateVector reg = bell_state(symbols[0]);
    for (std::size_t k = 1; k < symbols.size(); ++k) reg = tensor(reg, bell_state(symbols[k]));
    return reg;
}

struct Block {
    StateVector reg;
    std::vector<int> upper;  // qubit travelling in upper slot p
    std::vector<int> lower;  // qubit travelling in lower slot p

    int size() const noexcept { return static_cast<int>(upper.size()); }
};

// Freshly prepared block with the lower channel rearranged by `op`.
inline Block make_block(StateVector reg, const CoreOp& op) {
    const int n = reg.n_qubits() / 2;
    std::vector<int> upper(n), lower(n);
    for (int k = 0; k < n; ++k) {
        upper[k] = upper_qubit(k);
        lower[k] = lower_qubit(k);
    }
    return Block{std::move(reg), std::move(upper), apply_core(op, lower)};
}

// Equidistant slot view of a block stream. Slot times carry no information
// beyond their index.
struct Slot {
    std::uint64_t time;
    int upper_qubit;
    int lower_qubit;
};

inline std::vector<Slot> slots(const Block& b, std::uint64_t block_index) {
    std::vector<Slot> out;
    const auto n = static_cast<std::uint64_t>(b.size());
    for (int p = 0; p < b.size(); ++p)
        out.push_back(Slot{block_index * n + static_cast<std::uint64_t>(p), b.upper[p], b.lower[p]});
    return out;
}

}  // namespace coreqkd
