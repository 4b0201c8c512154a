#include <gtest/gtest.h>

#include <cmath>

#include "coreqkd/protocol.hpp"
#include "oracles.hpp"

using namespace coreqkd;

namespace {

SessionConfig ideal(int blocks, std::uint64_t seed) {
    SessionConfig c;
    c.n_blocks = blocks;
    c.control_key = ControlKey::from_bits("00011011");
    c.seed = seed;
    return c;
}

PairRecord pair(BellSymbol a, BellSymbol b, bool sifted = true) {
    PairRecord p;
    p.alice = a;
    p.bob = b;
    p.sifted = sifted;
    return p;
}

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

}  // namespace

TEST(Protocol, IdealRoundTripHasNoErrors) {
    const auto t = run_keyed_session(ideal(500, 3));
    ASSERT_TRUE(t.verdict);
    EXPECT_TRUE(t.verdict->accepted);
    EXPECT_EQ(t.stats.error_rate_all, 0.0);
    for (const auto& p : t.pairs) EXPECT_EQ(p.alice, p.bob);
    EXPECT_EQ(extract_raw_key(t, Party::Alice), extract_raw_key(t, Party::Bob));
    EXPECT_EQ(t.stats.raw_key_bits, extract_raw_key(t).size());
}

TEST(Protocol, AllOpsUsedByKey) {
    const auto t = run_keyed_session(ideal(8, 1));
    std::array<int, 4> seen{};
    for (const auto& b : t.blocks) ++seen[b.alice_op];
    for (int c : seen) EXPECT_EQ(c, 2);
}

TEST(Protocol, KeyedSessionIsDeterministic) {
    const auto a = run_keyed_session(ideal(50, 9));
    const auto b = run_keyed_session(ideal(50, 9));
    EXPECT_EQ(extract_raw_key(a), extract_raw_key(b));
}

TEST(Protocol, GuessCoreAttackErrorRate) {
    auto c = ideal(6250, 17);
    c.eve.kind = EveKind::GuessCore;
    c.check_fraction = 0.5;
    const auto t = run_keyed_session(c);
    // 25000 pairs: the all-pair rate sees 9/16 within a few standard errors.
    EXPECT_NEAR(t.stats.error_rate_all, 0.5625, 0.015);
    ASSERT_TRUE(t.stats.wrong_guess_error_rate);
    EXPECT_NEAR(*t.stats.wrong_guess_error_rate, 0.75, 0.015);
    ASSERT_TRUE(t.stats.eve_key_accuracy);
    EXPECT_NEAR(*t.stats.eve_key_accuracy, 0.25 + 0.75 * 0.25, 0.015);
    EXPECT_FALSE(t.verdict->accepted);
    EXPECT_THROW(extract_raw_key(t), Error);
}

TEST(EavesdropCheck, FractionAndCount) {
    SessionTranscript t;
    for (int i = 0; i < 100; ++i) t.pairs.push_back(pair(BellSymbol::PsiMinus, BellSymbol::PsiMinus));
    Rng rng(1);
    const auto v = eavesdrop_check(t, 0.1, 0.1, rng);
    EXPECT_EQ(v.checked_count, 10u);
    EXPECT_TRUE(v.accepted);
    EXPECT_EQ(t.unchecked_sifted(), 90u);
}

TEST(EavesdropCheck, OnlySiftedPairsAreEligible) {
    SessionTranscript t;
    for (int i = 0; i < 40; ++i) t.pairs.push_back(pair(BellSymbol::PsiMinus, BellSymbol::PhiPlus, i % 4 == 0));
    Rng rng(2);
    const auto v = eavesdrop_check(t, 0.5, 0.1, rng);
    EXPECT_EQ(v.checked_count, 5u);
    for (const auto& p : t.pairs)
        if (p.checked) EXPECT_TRUE(p.sifted);
    EXPECT_FALSE(v.accepted);
}

TEST(EavesdropCheck, ThresholdOneAcceptsEverything) {
    SessionTranscript t;
    for (int i = 0; i < 20; ++i) t.pairs.push_back(pair(BellSymbol::PsiMinus, BellSymbol::PsiPlus));
    Rng rng(3);
    EXPECT_TRUE(eavesdrop_check(t, 0.5, 1.0, rng).accepted);
}

TEST(EavesdropCheck, KeepsOneUncheckedPair) {
    SessionTranscript t;
    t.pairs.push_back(pair(BellSymbol::PsiMinus, BellSymbol::PsiMinus));
    t.pairs.push_back(pair(BellSymbol::PsiMinus, BellSymbol::PsiMinus));
    Rng rng(4);
    EXPECT_EQ(eavesdrop_check(t, 0.99, 0.1, rng).checked_count, 1u);
}

TEST(EavesdropCheck, RejectsAttackWithOverwhelmingProbability) {
    // With >= 200 checked pairs at a 9/16 error rate, acceptance at 10%
    // needs <= 20 errors: binomial tail ~ 4e-43.
    EXPECT_LT(oracle::binomial_cdf(20, 200, 0.5625), 1e-40);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto c = ideal(500, seed);
        c.eve.kind = EveKind::GuessCore;
        c.check_fraction = 0.1;
        const auto t = run_keyed_session(c);
        EXPECT_GE(t.verdict->checked_count, 200u);
        EXPECT_FALSE(t.verdict->accepted);
    }
}

TEST(RawKey, SymbolEncoding) {
    SessionTranscript t;
    t.pairs.push_back(pair(BellSymbol::PsiMinus, BellSymbol::PsiMinus));
    t.pairs.push_back(pair(BellSymbol::PhiPlus, BellSymbol::PhiPlus));
    EXPECT_EQ(extract_raw_key(t), (std::vector<std::uint8_t>{0, 0, 1, 1}));
}

TEST(RawKey, EmptyAndSkipsCheckedOrUnsifted) {
    SessionTranscript t;
    EXPECT_TRUE(extract_raw_key(t).empty());
    t.pairs.push_back(pair(BellSymbol::PhiMinus, BellSymbol::PhiMinus, false));
    auto checked = pair(BellSymbol::PsiPlus, BellSymbol::PsiPlus);
    checked.checked = true;
    t.pairs.push_back(checked);
    t.pairs.push_back(pair(BellSymbol::PsiPlus, BellSymbol::PsiPlus));
    EXPECT_EQ(extract_raw_key(t), (std::vector<std::uint8_t>{0, 1}));
}

TEST(RawKey, RejectedTranscriptRefused) {
    SessionTranscript t;
    t.pairs.push_back(pair(BellSymbol::PsiPlus, BellSymbol::PsiPlus));
    t.verdict = VerdictReport{false, 0.5, 0.1, 4};
    EXPECT_EQ(code_of([&] { extract_raw_key(t); }), ErrorCode::RejectedTranscript);
}

TEST(GuessProbability, ExactPowers) {
    EXPECT_EQ(guess_probability(0), 1.0);
    EXPECT_EQ(guess_probability(1), 0.25);
    EXPECT_EQ(guess_probability(2), 0.0625);
    EXPECT_EQ(guess_probability(10), 1.0 / 1048576.0);
    EXPECT_EQ(guess_probability(ControlKey::from_bits("0111")), 1.0 / 16.0);
    EXPECT_THROW(guess_probability(-1), Error);
}

TEST(GuessProbability, MonteCarloTwoValues) {
    Rng rng(99);
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto key = ControlKey::random(2, rng);
        const auto guess = ControlKey::random(2, rng);
        hits += key == guess;
    }
    EXPECT_NEAR(hits / double(n), 1.0 / 16.0, 0.005);
}

TEST(Bootstrap, SiftRateAndAgreement) {
    SessionConfig c;
    c.mode = Mode::Bootstrap;
    c.n_blocks = 4000;
    c.seed = 5;
    const auto r = run_bootstrap_session(c);
    ASSERT_TRUE(r.transcript.stats.sift_rate);
    EXPECT_NEAR(*r.transcript.stats.sift_rate, 0.25, 0.025);
    std::size_t disc = 0, disc_agree = 0;
    for (const auto& p : r.transcript.pairs) {
        if (p.sifted) {
            EXPECT_EQ(p.alice, p.bob);
        } else {
            ++disc;
            disc_agree += p.alice == p.bob;
        }
    }
    EXPECT_NEAR(double(disc_agree) / double(disc), 0.25, 0.02);
    ASSERT_TRUE(r.candidate);
    EXPECT_EQ(std::size_t(r.candidate->bit_length()), r.transcript.stats.raw_key_bits);
}

TEST(Bootstrap, CandidateTruncatedToRequest) {
    SessionConfig c;
    c.mode = Mode::Bootstrap;
    c.n_blocks = 100;
    c.bootstrap_key_bits = 8;
    const auto r = run_bootstrap_session(c);
    ASSERT_TRUE(r.candidate);
    EXPECT_EQ(r.candidate->bit_length(), 8);
}

TEST(Bootstrap, InsufficientSift) {
    SessionConfig c;
    c.mode = Mode::Bootstrap;
    c.n_blocks = 2;
    c.bootstrap_key_bits = 1000;
    EXPECT_EQ(code_of([&] { run_bootstrap_session(c); }), ErrorCode::InsufficientSift);
}

TEST(Bootstrap, CandidateDrivesKeyedSession) {
    SessionConfig c;
    c.mode = Mode::Bootstrap;
    c.n_blocks = 200;
    c.bootstrap_key_bits = 6;
    const auto r = run_bootstrap_session(c);
    ASSERT_TRUE(r.candidate);
    auto k = ideal(100, 2);
    k.control_key = *r.candidate;
    EXPECT_EQ(run_keyed_session(k).stats.error_rate_all, 0.0);
}

TEST(SessionConfig, Validation) {
    auto bad = [](auto mutate) {
        SessionConfig c;
        mutate(c);
        return code_of([&] { c.validate(); });
    };
    EXPECT_EQ(bad([](SessionConfig& c) { c.n_blocks = 0; }), ErrorCode::InvalidArgument);
    EXPECT_EQ(bad([](SessionConfig& c) { c.check_fraction = 1.0; }), ErrorCode::InvalidArgument);
    EXPECT_EQ(bad([](SessionConfig& c) { c.error_threshold = 0.0; }), ErrorCode::InvalidArgument);
    EXPECT_EQ(bad([](SessionConfig& c) { c.noise = 1.5; }), ErrorCode::InvalidArgument);
    EXPECT_EQ(bad([](SessionConfig& c) { c.block_size = 3; }), ErrorCode::InvalidArgument);
    EXPECT_EQ(bad([](SessionConfig& c) { c.bootstrap_key_bits = 3; }), ErrorCode::InvalidArgument);
    EXPECT_EQ(bad([](SessionConfig&) {}), ErrorCode::Internal);  // valid: nothing thrown
}
