#include <gtest/gtest.h>

#include <furnish/archive.hpp>

using namespace furnish;

namespace {

Elite at(CellIndex cell, double objective, double tag = 0.0) { return {{tag}, objective, {0.0, cell.count}, cell}; }

} // namespace

TEST(Archive, EmptyCellAcceptsAnything)
{
    Archive a;
    EXPECT_TRUE(a.empty());
    EXPECT_FALSE(a.best_objective());
    EXPECT_EQ(a.insert(at({3, 2}, -500.0)), (InsertResult{InsertStatus::NewCell, 0.0}));
    EXPECT_EQ(a.coverage(), 1u);
}

TEST(Archive, ReplacementNeedsStrictImprovement)
{
    Archive a;
    a.insert(at({3, 2}, -3.0, 1.0));
    EXPECT_EQ(a.insert(at({3, 2}, -5.0, 2.0)).status, InsertStatus::Rejected);
    EXPECT_EQ(a.insert(at({3, 2}, -3.0, 3.0)).status, InsertStatus::Rejected);
    EXPECT_EQ(a.find({3, 2})->latent[0], 1.0);

    const auto r = a.insert(at({3, 2}, -1.0, 4.0));
    EXPECT_EQ(r.status, InsertStatus::Improved);
    EXPECT_DOUBLE_EQ(r.delta, 2.0);
    EXPECT_EQ(a.find({3, 2})->latent[0], 4.0);
    EXPECT_EQ(a.coverage(), 1u);
}

TEST(Archive, QdScoreAndStats)
{
    Archive a;
    a.insert(at({0, 0}, 0.0));
    a.insert(at({1, 1}, -10.0));
    a.insert(at({1, 1}, -4.0));
    a.insert(at({1, 1}, -8.0));
    EXPECT_DOUBLE_EQ(a.qd_score(), (0.0 + 1e6) + (-4.0 + 1e6));
    EXPECT_EQ(*a.best_objective(), 0.0);
    EXPECT_EQ(a.stats().evaluations, 4);
    EXPECT_EQ(a.stats().insertions, 2);
    EXPECT_EQ(a.stats().improvements, 1);
    EXPECT_EQ(a.find({5, 5}), nullptr);
}

TEST(Archive, ElitesAreInCellOrder)
{
    Archive a;
    a.insert(at({4, 1}, -1.0, 1.0));
    a.insert(at({0, 9}, -1.0, 2.0));
    a.insert(at({0, 3}, -1.0, 3.0));
    EXPECT_EQ(a.elite_at(0).cell, (CellIndex{0, 3}));
    EXPECT_EQ(a.elite_at(1).cell, (CellIndex{0, 9}));
    EXPECT_EQ(a.elite_at(2).cell, (CellIndex{4, 1}));
}

TEST(Archive, RestoreSkipsStatistics)
{
    Archive a;
    a.restore(at({2, 2}, -7.0));
    EXPECT_EQ(a.coverage(), 1u);
    EXPECT_EQ(a.stats().evaluations, 0);
}
