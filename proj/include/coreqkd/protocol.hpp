// protocol.hpp
// Alice and Bob: block preparation, rearrangement, measurement, the
// eavesdropping check, raw-key extraction and on-site control-key bootstrap.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adversary.hpp"
#include "block.hpp"
#include "channel.hpp"
#include "core_ops.hpp"
#include "error.hpp"
#include "quantum.hpp"
#include "random.hpp"

namespace coreqkd {

enum class Mode { Keyed, Bootstrap };

constexpr std::string_view to_string(Mode m) noexcept {
    return m == Mode::Keyed ? "keyed" : "bootstrap";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "keyed") return Mode::Keyed;
    if (s == "bootstrap") return Mode::Bootstrap;
    throw Error(ErrorCode::InvalidArgument, "unknown mode '" + std::string(s) + "'");
}

struct SessionConfig {
    int n_blocks = 1000;
    int block_size = kDefaultBlockSize;
    ControlKey control_key = ControlKey::from_bits("01");
    GroupConfig group;
    double check_fraction = 0.1;
    double error_threshold = 0.1;
    std::uint64_t seed = 1;
    Mode mode = Mode::Keyed;
    EveStrategy eve;
    double noise = 0.0;
    PermutationSet perms = PermutationSet::cyclic();
    int bootstrap_key_bits = 0;  // requested candidate length; 0 takes everything

    void validate() const {
        require(n_blocks >= 1, "n_blocks must be >= 1");
        require(block_size == perms.block_size(), "block_size does not match the permutation set");
        require(check_fraction > 0.0 && check_fraction < 1.0, "check_fraction must be in (0, 1)");
        require(error_threshold > 0.0 && error_threshold <= 1.0, "error_threshold must be in (0, 1]");
        require(noise >= 0.0 && noise <= 1.0, "noise must be in [0, 1]");
        require(bootstrap_key_bits >= 0 && bootstrap_key_bits % 2 == 0,
                "bootstrap_key_bits must be an even count >= 0");
        require(mode == Mode::Bootstrap || !control_key.empty(), "keyed mode needs a control key");
        group.validate();
        eve.validate();
    }
};

struct PairRecord {
    std::uint64_t block = 0;
    int position = 0;
    BellSymbol alice = BellSymbol::PsiMinus;
    BellSymbol bob = BellSymbol::PsiMinus;
    std::optional<BellSymbol> eve;
    bool sifted = true;  // always true in keyed mode
    bool checked = false;

    bool error() const noexcept { return alice != bob; }
};

struct BlockRecord {
    int alice_op = 0;
    int bob_op = 0;
    std::optional<int> eve_guess;
};

struct VerdictReport {
    bool accepted = false;
    double measured_error_rate = 0.0;
    double threshold = 0.0;
    std::size_t checked_count = 0;
};

struct SessionStats {
    double error_rate_checked = 0.0;
    double error_rate_all = 0.0;  // over every sifted pair
    std::optional<double> wrong_guess_error_rate;
    std::optional<double> sift_rate;
    std::optional<double> eve_key_accuracy;
    std::optional<double> probe_mean;
    std::size_t raw_key_bits = 0;
};

struct SessionTranscript {
    Mode mode = Mode::Keyed;
    std::vector<PairRecord> pairs;
    std::vector<BlockRecord> blocks;
    std::optional<VerdictReport> verdict;
    EveLog eve_log;
    SessionStats stats;

    std::size_t unchecked_sifted() const {
        return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) {
            return p.sifted && !p.checked;
        }));
    }
};

struct PreparedBlock {
    std::vector<BellSymbol> symbols;
    StateVector reg;
};

inline PreparedBlock alice_prepare_block(Rng& rng, int block_size = kDefaultBlockSize) {
    require(block_size >= 1 && block_size <= kMaxQubits / 2, "block size must be 1..4");
    std::vector<BellSymbol> symbols(block_size);
    for (auto& s : symbols) s = symbol_from_bits(static_cast<unsigned>(uniform_index(rng, 4)));
    StateVector reg = prepare_pairs(symbols);
    return {std::move(symbols), std::move(reg)};
}

// Bob undoes `op` on the lower line and Bell-measures each restored pair.
inline std::vector<BellSymbol> bob_measure_block(const Block& block, const CoreOp& op, Rng& rng) {
    const auto restored = invert_core(op, block.lower);
    std::vector<BellSymbol> out;
    StateVector reg = block.reg;
    for (int k = 0; k < block.size(); ++k) {
        auto [sym, post] = bell_measure(reg, block.upper[k], restored[k], rng);
        out.push_back(sym);
        reg = std::move(post);
    }
    return out;
}

// Samples ceil(fraction * n) of the sifted pairs uniformly without
// replacement (keeping at least one unchecked), marks them checked and
// compares symbols over the classical channel.
inline VerdictReport eavesdrop_check(SessionTranscript& t, double check_fraction, double threshold,
                                     Rng& rng) {
    require(!t.pairs.empty(), "empty transcript");
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < t.pairs.size(); ++i) {
        t.pairs[i].checked = false;
        if (t.pairs[i].sifted) eligible.push_back(i);
    }
    std::size_t want = static_cast<std::size_t>(
        std::ceil(check_fraction * static_cast<double>(eligible.size()) - 1e-9));
    if (!eligible.empty()) want = std::min(want, eligible.size() - 1);
    // Partial Fisher-Yates.
    std::size_t errors = 0;
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + uniform_index(rng, eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
        auto& p = t.pairs[eligible[i]];
        p.checked = true;
        errors += p.error() ? 1 : 0;
    }
    VerdictReport v;
    v.checked_count = want;
    v.threshold = threshold;
    v.measured_error_rate = want == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(want);
    v.accepted = v.measured_error_rate <= threshold;
    t.verdict = v;
    return v;
}

enum class Party { Alice, Bob };

// Key bits of the unchecked sifted pairs in temporal order, two per pair.
inline std::vector<std::uint8_t> extract_raw_key(const SessionTranscript& t, Party party = Party::Bob) {
    if (t.verdict && !t.verdict->accepted)
        throw Error(ErrorCode::RejectedTranscript, "eavesdropping check rejected this session");
    std::vector<std::uint8_t> bits;
    for (const auto& p : t.pairs) {
        if (!p.sifted || p.checked) continue;
        const unsigned v = key_bits(party == Party::Alice ? p.alice : p.bob);
        bits.push_back(static_cast<std::uint8_t>(v >> 1));
        bits.push_back(static_cast<std::uint8_t>(v & 1));
    }
    return bits;
}

// 4^-N_k
inline double guess_probability(int n_k) {
    require(n_k >= 0, "N_k must be >= 0");
    return std::ldexp(1.0, -2 * n_k);
}

inline double guess_probability(const ControlKey& key) { return guess_probability(key.size()); }

namespace detail {

inline void finalize_stats(SessionTranscript& t) {
    SessionStats s;
    std::size_t sifted = 0, errors = 0, wrong = 0, wrong_errors = 0, eve_n = 0, eve_hits = 0;
    for (const auto& p : t.pairs) {
        if (!p.sifted) continue;
        ++sifted;
        errors += p.error();
        const auto& b = t.blocks[p.block];
        if (b.eve_guess && *b.eve_guess != b.alice_op) {
            ++wrong;
            wrong_errors += p.error();
        }
        if (p.eve && !p.checked) {
            ++eve_n;
            eve_hits += *p.eve == p.alice;
        }
    }
    auto ratio = [](std::size_t a, std::size_t b) { return static_cast<double>(a) / static_cast<double>(b); };
    s.error_rate_all = sifted ? ratio(errors, sifted) : 0.0;
    if (wrong) s.wrong_guess_error_rate = ratio(wrong_errors, wrong);
    if (eve_n) s.eve_key_accuracy = ratio(eve_hits, eve_n);
    if (t.mode == Mode::Bootstrap) {
        const auto same = std::count_if(t.blocks.begin(), t.blocks.end(),
                                        [](const auto& b) { return b.alice_op == b.bob_op; });
        s.sift_rate = ratio(static_cast<std::size_t>(same), t.blocks.size());
    }
    s.probe_mean = t.eve_log.probe_mean();
    if (t.verdict) {
        s.error_rate_checked = t.verdict->measured_error_rate;
        s.raw_key_bits = t.verdict->accepted ? 2 * t.unchecked_sifted() : 0;
    }
    t.stats = s;
}

// Shared transmission loop. `ops(block)` yields (alice_op, bob_op).
template <class OpSource>
SessionTranscript run_blocks(const SessionConfig& cfg, Rng& rng, OpSource&& ops) {
    SessionTranscript t;
    t.mode = cfg.mode;
    Eavesdropper eve(cfg.eve, cfg.perms, cfg.group);
    const bool has_eve = cfg.eve.kind != EveKind::None;
    for (int b = 0; b < cfg.n_blocks; ++b) {
        const auto block_index = static_cast<std::uint64_t>(b);
        const auto [alice_op, bob_op] = ops(block_index);
        PreparedBlock prep = alice_prepare_block(rng, cfg.block_size);
        Block block = make_block(std::move(prep.reg), alice_op);
        const std::size_t log_before = eve.log().blocks.size();
        block = transmit(std::move(block), has_eve ? &eve : nullptr, block_index, cfg.noise, rng);
        const auto bob = bob_measure_block(block, bob_op, rng);

        BlockRecord rec{alice_op.index, bob_op.index, std::nullopt};
        const EveBlockLog* elog =
            eve.log().blocks.size() > log_before ? &eve.log().blocks.back() : nullptr;
        if (elog) rec.eve_guess = elog->guessed_op;
        t.blocks.push_back(rec);
        for (int k = 0; k < cfg.block_size; ++k) {
            PairRecord p;
            p.block = block_index;
            p.position = k;
            p.alice = prep.symbols[k];
            p.bob = bob[k];
            p.sifted = alice_op.index == bob_op.index;
            if (elog && !elog->measured.empty()) p.eve = elog->measured[k];
            t.pairs.push_back(p);
        }
    }
    t.eve_log = eve.take_log();
    return t;
}

}  // namespace detail

inline SessionTranscript run_keyed_session(const SessionConfig& cfg) {
    cfg.validate();
    require(cfg.mode == Mode::Keyed, "run_keyed_session needs mode = keyed");
    Rng rng(cfg.seed);
    const KeyStream ks(cfg.control_key, cfg.group, cfg.perms);
    SessionTranscript t = detail::run_blocks(cfg, rng, [&](std::uint64_t b) {
        const CoreOp op = ks.at(b);
        return std::pair{op, op};
    });
    eavesdrop_check(t, cfg.check_fraction, cfg.error_threshold, rng);
    detail::finalize_stats(t);
    return t;
}

struct BootstrapResult {
    std::optional<ControlKey> candidate;  // present when accepted and nonempty
    SessionTranscript transcript;
};

// Both parties pick operations independently; blocks where the published
// choices agree are kept. Candidate key bits come from Bob's symbols on the
// unchecked sifted pairs.
inline BootstrapResult run_bootstrap_session(const SessionConfig& cfg) {
    cfg.validate();
    require(cfg.mode == Mode::Bootstrap, "run_bootstrap_session needs mode = bootstrap");
    Rng rng(cfg.seed);
    SessionTranscript t = detail::run_blocks(cfg, rng, [&](std::uint64_t) {
        const int a = static_cast<int>(uniform_index(rng, 4));
        const int b = static_cast<int>(uniform_index(rng, 4));
        return std::pair{cfg.perms.op(a), cfg.perms.op(b)};
    });
    const bool any_sifted = std::any_of(t.pairs.begin(), t.pairs.end(), [](const auto& p) { return p.sifted; });
    if (!any_sifted) {
        if (cfg.bootstrap_key_bits > 0)
            throw Error(ErrorCode::InsufficientSift, "no block had identical operations");
        t.verdict = VerdictReport{false, 0.0, cfg.error_threshold, 0};
    } else {
        eavesdrop_check(t, cfg.check_fraction, cfg.error_threshold, rng);
    }
    detail::finalize_stats(t);

    BootstrapResult r;
    if (t.verdict->accepted) {
        auto bits = extract_raw_key(t, Party::Bob);
        const auto want = static_cast<std::size_t>(cfg.bootstrap_key_bits);
        if (bits.size() < want)
            throw Error(ErrorCode::InsufficientSift,
                        std::to_string(bits.size()) + " sifted bits < requested " + std::to_string(want));
        if (want > 0) bits.resize(want);
        if (!bits.empty()) {
            std::vector<std::uint8_t> values;
            for (std::size_t i = 0; i + 1 < bits.size(); i += 2)
                values.push_back(static_cast<std::uint8_t>(bits[i] * 2 + bits[i + 1]));
            r.candidate = ControlKey(std::move(values));
        }
    }
    r.transcript = std::move(t);
    return r;
}

}  // namespace coreqkd
