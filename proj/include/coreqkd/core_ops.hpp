// core_ops.hpp
// Order-rearrangement operations on the lower channel: block permutations,
// the control key that selects them, and group-mode key streaming.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace coreqkd {

inline constexpr int kDefaultBlockSize = 4;

// A permutation of block positions {0..n-1}. Applied to a block, output
// position p carries input element at(p).
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<int> map) : map_(std::move(map)) {
        require(!map_.empty(), "empty permutation");
        std::vector<bool> seen(map_.size(), false);
        for (int v : map_) {
            require(v >= 0 && static_cast<std::size_t>(v) < map_.size() && !seen[v],
                    "not a permutation");
            seen[v] = true;
        }
    }

    static Permutation identity(int n) {
        std::vector<int> m(n);
        std::iota(m.begin(), m.end(), 0);
        return Permutation(std::move(m));
    }

    // Output position p carries input (p + k) mod n.
    static Permutation cyclic_shift(int n, int k) {
        std::vector<int> m(n);
        for (int p = 0; p < n; ++p) m[p] = ((p + k) % n + n) % n;
        return Permutation(std::move(m));
    }

    // Parses "1230"-style digit strings.
    static Permutation parse(std::string_view digits) {
        std::vector<int> m;
        for (char c : digits) {
            require(c >= '0' && c <= '9', "permutation digits must be 0-9");
            m.push_back(c - '0');
        }
        return Permutation(std::move(m));
    }

    int size() const noexcept { return static_cast<int>(map_.size()); }
    int operator[](int p) const { return map_[p]; }
    std::span<const int> map() const noexcept { return map_; }

    Permutation inverse() const {
        std::vector<int> inv(map_.size());
        for (std::size_t p = 0; p < map_.size(); ++p) inv[map_[p]] = static_cast<int>(p);
        return Permutation(std::move(inv));
    }

    // (this * other)(p) = this(other(p)): apply `this` reordering after `other`.
    Permutation then(const Permutation& other) const {
        require(size() == other.size(), "permutation size mismatch");
        std::vector<int> m(map_.size());
        for (std::size_t p = 0; p < map_.size(); ++p) m[p] = map_[other.map_[p]];
        return Permutation(std::move(m));
    }

    bool is_identity() const {
        for (std::size_t p = 0; p < map_.size(); ++p)
            if (map_[p] != static_cast<int>(p)) return false;
        return true;
    }

    bool is_derangement() const {
        for (std::size_t p = 0; p < map_.size(); ++p)
            if (map_[p] == static_cast<int>(p)) return false;
        return true;
    }

    std::string str() const {
        std::string s;
        for (int v : map_) s += static_cast<char>('0' + v);
        return s;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> map_;
};

struct CoreOp {
    int index = 0;  // 2-bit control-key value
    Permutation perm;
};

// The four operations E0..E3 selectable by a 2-bit key value.
class PermutationSet {
public:
    explicit PermutationSet(std::array<Permutation, 4> perms) : perms_(std::move(perms)) {
        const int n = perms_[0].size();
        require(n >= 1 && n <= 4, "block size must be 1..4 (8-qubit register cap)");
        for (const auto& p : perms_) require(p.size() == n, "permutations differ in size");
        require(perms_[0].is_identity(), "E0 must be the identity");
        for (int k = 1; k < 4; ++k) {
            require(perms_[k].is_derangement(), "E" + std::to_string(k) + " is not a derangement");
            for (int j = 1; j < k; ++j)
                require(!(perms_[j] == perms_[k]), "E1..E3 must be pairwise distinct");
        }
    }

    // Cyclic shifts by 0, 1, 2, 3.
    static PermutationSet cyclic(int block_size = kDefaultBlockSize) {
        return PermutationSet({Permutation::cyclic_shift(block_size, 0),
                               Permutation::cyclic_shift(block_size, 1),
                               Permutation::cyclic_shift(block_size, 2),
                               Permutation::cyclic_shift(block_size, 3)});
    }

    int block_size() const noexcept { return perms_[0].size(); }

    CoreOp op(int index) const {
        require(index >= 0 && index < 4, "CORE op index must be 0..3");
        return CoreOp{index, perms_[index]};
    }

    const std::array<Permutation, 4>& perms() const noexcept { return perms_; }

private:
    std::array<Permutation, 4> perms_;
};

template <class T>
std::vector<T> apply_core(const CoreOp& op, std::span<const T> block) {
    require(static_cast<int>(block.size()) == op.perm.size(), "wrong block length");
    std::vector<T> out;
    out.reserve(block.size());
    for (int p = 0; p < op.perm.size(); ++p) out.push_back(block[op.perm[p]]);
    return out;
}

template <class T>
std::vector<T> invert_core(const CoreOp& op, std::span<const T> block) {
    require(static_cast<int>(block.size()) == op.perm.size(), "wrong block length");
    std::vector<T> out(block.size());
    for (int p = 0; p < op.perm.size(); ++p) out[op.perm[p]] = block[p];
    return out;
}

template <class T>
std::vector<T> apply_core(const CoreOp& op, const std::vector<T>& block) {
    return apply_core(op, std::span<const T>(block));
}

template <class T>
std::vector<T> invert_core(const CoreOp& op, const std::vector<T>& block) {
    return invert_core(op, std::span<const T>(block));
}

// Pre-shared key of 2*N_k bits, read as N_k operation indices and reused
// cyclically.
class ControlKey {
public:
    ControlKey() = default;

    explicit ControlKey(std::vector<std::uint8_t> values) : values_(std::move(values)) {
        require(!values_.empty(), "control key needs at least 2 bits");
        for (auto v : values_) require(v < 4, "control key value must be 0..3");
    }

    // "0111" -> [01, 11]
    static ControlKey from_bits(std::string_view bits) {
        require(!bits.empty() && bits.size() % 2 == 0, "control key must have an even, nonzero bit count");
        std::vector<std::uint8_t> v;
        for (std::size_t i = 0; i < bits.size(); i += 2) {
            for (std::size_t k = i; k < i + 2; ++k)
                require(bits[k] == '0' || bits[k] == '1', "control key bits must be 0/1");
            v.push_back(static_cast<std::uint8_t>((bits[i] - '0') * 2 + (bits[i + 1] - '0')));
        }
        return ControlKey(std::move(v));
    }

    static ControlKey random(int n_values, Rng& rng) {
        require(n_values >= 1, "control key length must be >= 1");
        std::vector<std::uint8_t> v(n_values);
        for (auto& x : v) x = static_cast<std::uint8_t>(uniform_index(rng, 4));
        return ControlKey(std::move(v));
    }

    bool empty() const noexcept { return values_.empty(); }
    int size() const noexcept { return static_cast<int>(values_.size()); }  // N_k
    int bit_length() const noexcept { return 2 * size(); }
    int operator[](int i) const { return values_[i]; }
    std::span<const std::uint8_t> values() const noexcept { return values_; }

    std::string bits() const {
        std::string s;
        for (auto v : values_) {
            s += static_cast<char>('0' + (v >> 1));
            s += static_cast<char>('0' + (v & 1));
        }
        return s;
    }

    friend bool operator==(const ControlKey&, const ControlKey&) = default;

private:
    std::vector<std::uint8_t> values_;
};

struct GroupConfig {
    int group_size = 1;  // consecutive blocks governed by one key value

    void validate() const { require(group_size >= 1, "group_size must be >= 1"); }
};

// Block t uses key value at floor(t / group_size) mod N_k.
class KeyStream {
public:
    KeyStream(ControlKey key, GroupConfig group, PermutationSet perms)
        : key_(std::move(key)), group_(group), perms_(std::move(perms)) {
        require(!key_.empty(), "empty control key");
        group_.validate();
    }

    int index_at(std::uint64_t block) const {
        const auto pos = (block / static_cast<std::uint64_t>(group_.group_size)) %
                         static_cast<std::uint64_t>(key_.size());
        return key_[static_cast<int>(pos)];
    }

    CoreOp at(std::uint64_t block) const { return perms_.op(index_at(block)); }

    CoreOp next() { return at(cursor_++); }

private:
    ControlKey key_;
    GroupConfig group_;
    PermutationSet perms_;
    std::uint64_t cursor_ = 0;
};

inline KeyStream key_stream(const ControlKey& key, GroupConfig group,
                            const PermutationSet& perms = PermutationSet::cyclic()) {
    return KeyStream(key, group, perms);
}

}  // namespace coreqkd
