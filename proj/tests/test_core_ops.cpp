#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "coreqkd/core_ops.hpp"

using namespace coreqkd;

TEST(Permutation, ParseAndPrint) {
    const auto p = Permutation::parse("1230");
    EXPECT_EQ(p.size(), 4);
    EXPECT_EQ(p[0], 1);
    EXPECT_EQ(p.str(), "1230");
    EXPECT_THROW(Permutation::parse("1123"), Error);
    EXPECT_THROW(Permutation::parse("12a0"), Error);
    EXPECT_THROW(Permutation::parse(""), Error);
}

TEST(Permutation, DerangementPredicate) {
    EXPECT_TRUE(Permutation::parse("1230").is_derangement());
    EXPECT_TRUE(Permutation::parse("1032").is_derangement());
    EXPECT_FALSE(Permutation::parse("0231").is_derangement());
    EXPECT_TRUE(Permutation::identity(4).is_identity());
}

TEST(CoreOps, IdentityLeavesBlockUnchanged) {
    const auto set = PermutationSet::cyclic();
    const std::vector<char> in = {'a', 'b', 'c', 'd'};
    EXPECT_EQ(apply_core(set.op(0), in), in);
}

TEST(CoreOps, ShiftByOne) {
    const auto set = PermutationSet::cyclic();
    const std::vector<char> in = {'a', 'b', 'c', 'd'};
    EXPECT_EQ(apply_core(set.op(1), in), (std::vector<char>{'b', 'c', 'd', 'a'}));
    EXPECT_EQ(apply_core(set.op(2), in), (std::vector<char>{'c', 'd', 'a', 'b'}));
    EXPECT_EQ(apply_core(set.op(3), in), (std::vector<char>{'d', 'a', 'b', 'c'}));
    EXPECT_EQ(set.op(1).perm.str(), "1230");
}

TEST(CoreOps, InverseRoundTripsEveryS4Element) {
    std::vector<int> m = {0, 1, 2, 3};
    const std::vector<int> data = {10, 20, 30, 40};
    int count = 0;
    do {
        const CoreOp op{0, Permutation(m)};
        EXPECT_EQ(invert_core(op, apply_core(op, data)), data);
        EXPECT_EQ(apply_core(op, invert_core(op, data)), data);
        EXPECT_TRUE(op.perm.then(op.perm.inverse()).is_identity());
        ++count;
    } while (std::next_permutation(m.begin(), m.end()));
    EXPECT_EQ(count, 24);
}

TEST(CoreOps, ShiftOneInverseIsShiftThree) {
    const auto set = PermutationSet::cyclic();
    EXPECT_EQ(set.op(1).perm.inverse(), set.op(3).perm);
    EXPECT_EQ(set.op(2).perm.inverse(), set.op(2).perm);
}

TEST(CoreOps, DefaultSetClosedUnderInversion) {
    const auto set = PermutationSet::cyclic();
    for (const auto& p : set.perms()) {
        const auto inv = p.inverse();
        EXPECT_TRUE(std::any_of(set.perms().begin(), set.perms().end(), [&](const auto& q) { return q == inv; }));
    }
}

TEST(PermutationSet, ValidationRules) {
    const auto id = Permutation::identity(4);
    const auto s1 = Permutation::parse("1230");
    const auto s2 = Permutation::parse("2301");
    EXPECT_THROW(PermutationSet({s1, s1, s2, id}), Error);                                // E0 not identity
    EXPECT_THROW(PermutationSet({id, s1, s1, s2}), Error);                                // duplicate
    EXPECT_THROW(PermutationSet({id, s1, s2, Permutation::parse("0321")}), Error);        // not derangement
    EXPECT_NO_THROW(PermutationSet({id, s1, s2, Permutation::parse("1032")}));
    EXPECT_THROW(PermutationSet::cyclic(5), Error);
}

TEST(PermutationSet, EveryNonIdentityOpDerangesEveryPosition) {
    const auto set = PermutationSet::cyclic();
    for (int i = 1; i < 4; ++i)
        for (int p = 0; p < 4; ++p) EXPECT_NE(set.op(i).perm[p], p);
}

TEST(ControlKey, BitParsing) {
    const auto k = ControlKey::from_bits("0111");
    EXPECT_EQ(k.size(), 2);
    EXPECT_EQ(k.bit_length(), 4);
    EXPECT_EQ(k[0], 1);
    EXPECT_EQ(k[1], 3);
    EXPECT_EQ(k.bits(), "0111");
    EXPECT_THROW(ControlKey::from_bits("011"), Error);
    EXPECT_THROW(ControlKey::from_bits(""), Error);
    EXPECT_THROW(ControlKey::from_bits("0121"), Error);
}

TEST(KeyStream, CyclesThroughKey) {
    auto ks = key_stream(ControlKey::from_bits("0111"), {});
    const std::vector<int> expect = {1, 3, 1, 3, 1};
    for (int e : expect) EXPECT_EQ(ks.next().index, e);
}

TEST(KeyStream, GroupModeHoldsEachValue) {
    auto ks = key_stream(ControlKey::from_bits("0111"), GroupConfig{3});
    const std::vector<int> expect = {1, 1, 1, 3, 3, 3, 1};
    for (int e : expect) EXPECT_EQ(ks.next().index, e);
    EXPECT_EQ(ks.at(1'000'000'000'000ULL).index, ControlKey::from_bits("0111")[(1'000'000'000'000ULL / 3) % 2]);
    EXPECT_THROW(key_stream(ControlKey::from_bits("01"), GroupConfig{0}), Error);
}

TEST(KeyStream, RandomAccessMatchesSequential) {
    Rng rng(1);
    const auto key = ControlKey::random(7, rng);
    auto seq = key_stream(key, GroupConfig{2});
    const auto ra = key_stream(key, GroupConfig{2});
    for (std::uint64_t t = 0; t < 100; ++t) EXPECT_EQ(seq.next().index, ra.at(t).index);
}
