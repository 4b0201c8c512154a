// adversary.hpp
// Eavesdropper strategies acting on whole blocks in flight.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "block.hpp"
#include "core_ops.hpp"
#include "error.hpp"
#include "quantum.hpp"
#include "random.hpp"

namespace coreqkd {

enum class EveKind { None, GuessCore, KnownKey, BellProbe };
enum class ProbePairing { Matched, Mismatched };

constexpr std::string_view to_string(EveKind k) noexcept {
    switch (k) {
        case EveKind::None: return "none";
        case EveKind::GuessCore: return "guess_core";
        case EveKind::KnownKey: return "known_key";
        case EveKind::BellProbe: return "bell_probe";
    }
    return "?";
}

inline EveKind parse_eve_kind(std::string_view s) {
    if (s == "none") return EveKind::None;
    if (s == "guess_core") return EveKind::GuessCore;
    if (s == "known_key") return EveKind::KnownKey;
    if (s == "bell_probe") return EveKind::BellProbe;
    throw Error(ErrorCode::InvalidArgument, "unknown eve kind '" + std::string(s) + "'");
}

constexpr std::string_view to_string(ProbePairing p) noexcept {
    return p == ProbePairing::Matched ? "matched" : "mismatched";
}

struct EveStrategy {
    EveKind kind = EveKind::None;
    std::array<double, 4> guess_weights{0.25, 0.25, 0.25, 0.25};  // guess_core
    ControlKey known_key;                                         // known_key
    Direction probe_a = Direction::z_axis();                      // bell_probe
    Direction probe_b = Direction::z_axis();
    ProbePairing pairing = ProbePairing::Mismatched;
    int probe_budget = 1;  // duos probed per block

    void validate() const {
        double total = 0.0;
        for (double w : guess_weights) {
            require(w >= 0.0, "guess weights must be nonnegative");
            total += w;
        }
        require(std::abs(total - 1.0) <= 1e-9, "guess weights must sum to 1");
        if (kind == EveKind::KnownKey) require(!known_key.empty(), "known_key strategy needs a key");
        if (kind == EveKind::BellProbe)
            require(probe_budget >= 1 && probe_budget <= 4, "probe_budget must be 1..4");
    }
};

struct EveBlockLog {
    std::uint64_t block = 0;
    std::optional<int> guessed_op;
    std::vector<BellSymbol> measured;  // per upper slot, Eve's Bell outcome
    std::vector<BellSymbol> resent;
    std::vector<int> probe_outcomes;   // +-1
};

struct EveLog {
    std::vector<EveBlockLog> blocks;
    double probe_sum = 0.0;
    std::uint64_t probe_count = 0;

    std::optional<double> probe_mean() const {
        if (probe_count == 0) return std::nullopt;
        return probe_sum / static_cast<double>(probe_count);
    }
};

// Intercept-resend with a guessed rearrangement: undo `guess` on the lower
// channel, Bell-measure the resulting duos, prepare fresh pairs in the
// measured symbols, rearrange them with `guess` and forward.
inline std::pair<Block, EveBlockLog> eve_guess_core_attack(const Block& block, const CoreOp& guess,
                                                           Rng& rng) {
    const int n = block.size();
    const auto restored = invert_core(guess, block.lower);
    EveBlockLog log;
    log.guessed_op = guess.index;
    StateVector reg = block.reg;
    for (int k = 0; k < n; ++k) {
        auto [sym, post] = bell_measure(reg, block.upper[k], restored[k], rng);
        log.measured.push_back(sym);
        reg = std::move(post);
    }
    log.resent = log.measured;
    Block fresh = make_block(prepare_pairs(log.resent), guess);
    return {std::move(fresh), std::move(log)};
}

// Qubit paired with upper slot k for a probe: its own partner, or the lower
// particle of the next pair.
inline int probe_partner(const Block& block, int k, ProbePairing pairing) {
    const int n = block.size();
    return pairing == ProbePairing::Matched ? lower_qubit(k) : lower_qubit((k + 1) % n);
}

// Measures (sigma.a)(x)(sigma.b) on duo k and returns the +-1 outcome with the
// collapsed block.
inline std::pair<int, Block> eve_bell_probe(const Block& block, int k, ProbePairing pairing,
                                            const Direction& a, const Direction& b, Rng& rng) {
    require(k >= 0 && k < block.size(), "probe index out of range");
    auto [sign, post] =
        correlation_measure(block.reg, block.upper[k], probe_partner(block, k, pairing), a, b, rng);
    return {sign, Block{std::move(post), block.upper, block.lower}};
}

// One strategy instance per session. Eve knows the permutation set and
// group size, never the session key (except for the known_key strategy).
class Eavesdropper {
public:
    Eavesdropper(EveStrategy strategy, PermutationSet perms, GroupConfig group)
        : strategy_(std::move(strategy)), perms_(std::move(perms)), group_(group) {
        strategy_.validate();
    }

    const EveStrategy& strategy() const noexcept { return strategy_; }
    const EveLog& log() const noexcept { return log_; }
    EveLog take_log() { return std::move(log_); }

    void intercept(Block& block, std::uint64_t block_index, Rng& rng) {
        switch (strategy_.kind) {
            case EveKind::None:
                return;
            case EveKind::GuessCore: {
                const int g = static_cast<int>(sample_index(rng, strategy_.guess_weights));
                run_guess(block, block_index, perms_.op(g), rng);
                return;
            }
            case EveKind::KnownKey: {
                const KeyStream ks(strategy_.known_key, group_, perms_);
                run_guess(block, block_index, ks.at(block_index), rng);
                return;
            }
            case EveKind::BellProbe: {
                EveBlockLog entry;
                entry.block = block_index;
                for (int k = 0; k < strategy_.probe_budget && k < block.size(); ++k) {
                    auto [sign, post] = eve_bell_probe(block, k, strategy_.pairing, strategy_.probe_a,
                                                       strategy_.probe_b, rng);
                    block = std::move(post);
                    entry.probe_outcomes.push_back(sign);
                    log_.probe_sum += sign;
                    ++log_.probe_count;
                }
                log_.blocks.push_back(std::move(entry));
                return;
            }
        }
    }

private:
    void run_guess(Block& block, std::uint64_t block_index, const CoreOp& guess, Rng& rng) {
        auto [fresh, entry] = eve_guess_core_attack(block, guess, rng);
        entry.block = block_index;
        block = std::move(fresh);
        log_.blocks.push_back(std::move(entry));
    }

    EveStrategy strategy_;
    PermutationSet perms_;
    GroupConfig group_;
    EveLog log_;
};

}  // namespace coreqkd
