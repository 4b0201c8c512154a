#include <gtest/gtest.h>

#include "coreqkd/adversary.hpp"
#include "coreqkd/protocol.hpp"

using namespace coreqkd;

namespace {

const std::vector<BellSymbol> kSyms = {BellSymbol::PsiMinus, BellSymbol::PhiPlus, BellSymbol::PsiPlus,
                                       BellSymbol::PhiMinus};

// Probability that Bob, undoing `bob_op`, recovers Alice's symbol at k.
double survive_probability(const Block& b, const CoreOp& bob_op, int k, BellSymbol alice) {
    const auto restored = invert_core(bob_op, b.lower);
    return bell_probabilities(b.reg, b.upper[k], restored[k])[key_bits(alice)];
}

}  // namespace

TEST(Adversary, WrongDerangementGuessGivesThreeQuartersExactly) {
    // Eve's re-prepared pairs are paired with the wrong partner by Bob. The
    // exact per-pair error is computed from Born weights over all of Eve's
    // possible outcomes: for a wrong guess, the outcome Bob gets for a
    // mismatched duo is uniform, so the error is 3/4 independent of symbols.
    const auto set = PermutationSet::cyclic();
    const auto reg = prepare_pairs(kSyms);
    for (int key = 0; key < 4; ++key)
        for (int guess = 0; guess < 4; ++guess) {
            if (guess == key) continue;
            const Block sent = make_block(reg, set.op(key));
            // Eve's view: undo the guess and read the duo distribution.
            const auto eve_restored = invert_core(set.op(guess), sent.lower);
            for (int k = 0; k < 4; ++k) {
                const auto p = bell_probabilities(sent.reg, sent.upper[k], eve_restored[k]);
                for (double x : p) EXPECT_NEAR(x, 0.25, 1e-12);
            }
            // Bob's view of any resent block: he undoes the key on a block
            // rearranged with the guess, again a mismatched duo.
            const Block resent = make_block(prepare_pairs(kSyms), set.op(guess));
            for (int k = 0; k < 4; ++k)
                EXPECT_NEAR(1.0 - survive_probability(resent, set.op(key), k, kSyms[k]), 0.75, 1e-12);
        }
}

TEST(Adversary, CorrectGuessIsTransparent) {
    const auto set = PermutationSet::cyclic();
    Rng rng(5);
    for (int op = 0; op < 4; ++op) {
        const Block sent = make_block(prepare_pairs(kSyms), set.op(op));
        auto [resent, log] = eve_guess_core_attack(sent, set.op(op), rng);
        EXPECT_EQ(log.measured, kSyms);
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(survive_probability(resent, set.op(op), k, kSyms[k]), 1.0, 1e-12);
    }
}

TEST(Adversary, EveSeesMaximallyMixedHalves) {
    const auto reg = prepare_pairs(kSyms);
    for (int q = 0; q < 8; ++q) {
        const auto rho = reduced_density(reg, {q});
        EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-12);
        EXPECT_NEAR(std::abs(rho(0, 1)), 0.0, 1e-12);
    }
    // Mismatched duo A_0, B_1 is I/4.
    const auto duo = reduced_density(reg, {0, 3});
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(duo(r, c) - (r == c ? 0.25 : 0.0)), 0.0, 1e-12);
}

TEST(Adversary, BellProbeMeansOverEnsemble) {
    Rng rng(21);
    const auto a = Direction::random(rng), b = Direction::random(rng);
    const auto set = PermutationSet::cyclic();
    for (auto pairing : {ProbePairing::Matched, ProbePairing::Mismatched}) {
        double sum = 0;
        const int n = 40000;
        for (int t = 0; t < n; ++t) {
            auto prep = alice_prepare_block(rng);
            const Block blk = make_block(std::move(prep.reg), set.op(0));
            sum += eve_bell_probe(blk, 0, pairing, a, b, rng).first;
        }
        EXPECT_NEAR(sum / n, 0.0, 0.02);
    }
}

TEST(Adversary, BellProbeOnFixedSingletIsPerfectlyAnticorrelated) {
    Rng rng(22);
    const auto a = Direction::random(rng);
    const std::vector<BellSymbol> singlets(4, BellSymbol::PsiMinus);
    const Block blk = make_block(prepare_pairs(singlets), PermutationSet::cyclic().op(0));
    for (int t = 0; t < 100; ++t) EXPECT_EQ(eve_bell_probe(blk, 2, ProbePairing::Matched, a, a, rng).first, -1);
}

TEST(Adversary, KnownKeyEveIsUndetected) {
    SessionConfig c;
    c.n_blocks = 300;
    c.control_key = ControlKey::from_bits("011110");
    c.eve.kind = EveKind::KnownKey;
    c.eve.known_key = c.control_key;
    const auto t = run_keyed_session(c);
    EXPECT_EQ(t.stats.error_rate_all, 0.0);
    ASSERT_TRUE(t.stats.eve_key_accuracy);
    EXPECT_EQ(*t.stats.eve_key_accuracy, 1.0);
}

TEST(Adversary, KnownKeyWithWrongPositionsIsDetected) {
    // Eve knows the key values but is off by one block in the stream.
    SessionConfig c;
    c.n_blocks = 300;
    c.control_key = ControlKey::from_bits("0110");
    c.eve.kind = EveKind::KnownKey;
    c.eve.known_key = ControlKey::from_bits("1001");
    const auto t = run_keyed_session(c);
    EXPECT_NEAR(t.stats.error_rate_all, 0.75, 0.03);
    EXPECT_FALSE(t.verdict->accepted);
}

TEST(Adversary, StrategyValidation) {
    EveStrategy s;
    s.guess_weights = {0.5, 0.5, 0.5, 0.0};
    EXPECT_THROW(s.validate(), Error);
    s = {};
    s.kind = EveKind::KnownKey;
    EXPECT_THROW(s.validate(), Error);
    s = {};
    s.kind = EveKind::BellProbe;
    s.probe_budget = 5;
    EXPECT_THROW(s.validate(), Error);
    EXPECT_EQ(parse_eve_kind("guess_core"), EveKind::GuessCore);
    EXPECT_THROW(parse_eve_kind("bogus"), Error);
}

TEST(Adversary, BiasedGuessWeightsOnlyShiftEveAccuracy) {
    // A degenerate strategy that always guesses identity against a key that
    // never uses it: every block is attacked with a wrong derangement.
    SessionConfig c;
    c.n_blocks = 1000;
    c.control_key = ControlKey::from_bits("011011");
    c.eve.kind = EveKind::GuessCore;
    c.eve.guess_weights = {1.0, 0.0, 0.0, 0.0};
    const auto t = run_keyed_session(c);
    EXPECT_NEAR(t.stats.error_rate_all, 0.75, 0.02);
    for (const auto& b : t.blocks) EXPECT_EQ(b.eve_guess, 0);
}
