#include <gtest/gtest.h>

#include <set>

#include "femtopc/random.hpp"

using namespace femtopc;

TEST(Random, StreamsAreReproducible)
{
    Rng a = make_rng(42, Stream::Shadowing, 7);
    Rng b = make_rng(42, Stream::Shadowing, 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Random, StreamsDifferByTagIndexAndSeed)
{
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        for (auto s : {Stream::MacroUsers, Stream::Buildings, Stream::Walls}) {
            for (std::uint64_t idx = 0; idx < 3; ++idx) firsts.insert(make_rng(seed, s, idx)());
        }
    }
    EXPECT_EQ(firsts.size(), 18u);
}

TEST(Random, DropSeedsDistinct)
{
    std::set<std::uint64_t> seeds;
    for (std::uint64_t d = 0; d < 1000; ++d) seeds.insert(drop_seed(1, d));
    EXPECT_EQ(seeds.size(), 1000u);
    EXPECT_NE(drop_seed(1, 0), drop_seed(2, 0));
}
