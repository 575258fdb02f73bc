#include <gtest/gtest.h>

#include <random>

#include "escape/tiling.hpp"

using namespace escape;

namespace
{

// Every shade assignment with axis-correct orientations, checked by the
// conditions written out directly on coordinates.
bool exists_by_enumeration(const TilingInstance& inst, int k)
{
    GridShading s(k);
    const std::size_t n = s.edge_count(), shades = inst.shade_count();
    std::vector<std::size_t> c(n, 0);
    for (;;) {
        for (std::size_t e = 0; e < n; ++e)
            s[e].shade = static_cast<std::uint8_t>(c[e]);
        bool ok = s.at({0, 0, Orient::H}).shade == inst.gray() && s.at({k, k - 1, Orient::V}).shade == inst.black();
        for (int i = 0; ok && i <= k; ++i)
            for (int j = 0; ok && j <= k; ++j)
                for (GridEdge in : {GridEdge{i - 1, j, Orient::H}, GridEdge{i, j - 1, Orient::V}})
                    for (GridEdge out : {GridEdge{i, j, Orient::H}, GridEdge{i, j, Orient::V}})
                        if (ok && s.contains(in) && s.contains(out))
                            ok = !inst.is_forbidden(s.at(in), s.at(out));
        if (ok)
            return true;
        std::size_t i = 0;
        while (i < n && ++c[i] == shades)
            c[i++] = 0;
        if (i == n)
            return false;
    }
}

TilingInstance random_instance(std::mt19937_64& rng)
{
    std::vector<std::string> shades{"gray", "black", "white"};
    shades.resize(std::uniform_int_distribution<std::size_t>(2, 3)(rng));
    double density = std::uniform_real_distribution<double>(0, 0.8)(rng);
    std::set<ForbiddenPair> f;
    for (const auto& p : TilingInstance::all_pairs(shades.size()))
        if (std::uniform_real_distribution<double>(0, 1)(rng) < density)
            f.insert(p);
    return TilingInstance(shades, f);
}

}  // namespace

TEST(Instance, Validation)
{
    EXPECT_THROW(TilingInstance({"gray"}), std::invalid_argument);
    EXPECT_THROW(TilingInstance({"gray", "white"}), std::invalid_argument);
    EXPECT_THROW(TilingInstance({"gray", "black"}, {{{Orient::H, 0}, {Orient::V, 5}}}), std::invalid_argument);
    TilingInstance inst({"gray", "black", "amber"});
    EXPECT_EQ(inst.shades(), (std::vector<std::string>{"amber", "black", "gray"}));
    EXPECT_EQ(inst.gray(), 2);
    EXPECT_EQ(inst.black(), 1);
    EXPECT_EQ(TilingInstance::all_pairs(3).size(), 36u);
}

TEST(Grid, EdgeIndexIsABijection)
{
    for (int k = 1; k <= 4; ++k) {
        GridShading s(k);
        EXPECT_EQ(s.edge_count(), static_cast<std::size_t>(2 * k * (k + 1)));
        std::set<std::tuple<int, int, int>> seen;
        for (std::size_t e = 0; e < s.edge_count(); ++e) {
            auto g = s.edge(e);
            EXPECT_EQ(s.index(g), e);
            EXPECT_EQ(s[e].orient, g.dir);
            auto [x, y] = g.to();
            EXPECT_LE(x, k);
            EXPECT_LE(y, k);
            seen.insert({g.i, g.j, int(g.dir)});
        }
        EXPECT_EQ(seen.size(), s.edge_count());
        EXPECT_FALSE(s.contains({k, 0, Orient::H}));
        EXPECT_FALSE(s.contains({0, k, Orient::V}));
        EXPECT_FALSE(s.contains({-1, 0, Orient::H}));
    }
    EXPECT_THROW(GridShading(0), std::invalid_argument);
}

TEST(Check, EachConditionDetected)
{
    TilingInstance inst({"gray", "black"}, {{{Orient::H, 0}, {Orient::V, 0}}});
    auto gray = inst.gray(), black = inst.black();
    GridShading s(1);
    s.at({0, 0, Orient::H}).shade = gray;
    s.at({1, 0, Orient::V}).shade = black;
    s.at({0, 0, Orient::V}).shade = black;
    s.at({0, 1, Orient::H}).shade = black;
    // (0,0)->(1,0) gray H then (1,0)->(1,1) black V; forbidden pair is (H,black),(V,black).
    auto r = check_shading(inst, s);
    EXPECT_TRUE(r.proper());

    auto bad = s;
    bad.at({0, 0, Orient::H}).shade = black;
    r = check_shading(inst, bad);
    EXPECT_FALSE(r.b1.pass);
    EXPECT_FALSE(r.b3.pass);
    EXPECT_TRUE(r.passes(A1 | A2 | B2));

    bad = s;
    bad.at({1, 0, Orient::V}).shade = gray;
    EXPECT_FALSE(check_shading(inst, bad).b2.pass);

    bad = s;
    bad.at({0, 0, Orient::V}).orient = Orient::H;
    r = check_shading(inst, bad);
    EXPECT_TRUE(r.a1.pass);
    EXPECT_FALSE(r.a2.pass);
    EXPECT_FALSE(r.a2.witness.empty());

    bad = s;
    bad.at({0, 1, Orient::H}).orient = Orient::V;
    EXPECT_FALSE(check_shading(inst, bad).a1.pass);

    bad = s;
    bad.at({0, 0, Orient::V}).shade = 7;
    EXPECT_THROW(check_shading(inst, bad), std::invalid_argument);
}

TEST(Search, AgreesWithEnumeration)
{
    std::mt19937_64 rng(21);
    int yes = 0, no = 0;
    for (int round = 0; round < 60; ++round) {
        auto inst = random_instance(rng);
        for (int k = 1; k <= 2; ++k) {
            auto s = search_shading(inst, k);
            ASSERT_EQ(s.has_value(), exists_by_enumeration(inst, k)) << "round " << round << " k " << k;
            if (s) {
                ++yes;
                EXPECT_TRUE(check_shading(inst, *s).proper());
                EXPECT_EQ(s->k(), k);
            } else {
                ++no;
            }
        }
    }
    EXPECT_GT(yes, 10);
    EXPECT_GT(no, 10);
}

TEST(Search, ConditionSubsets)
{
    TilingInstance inst({"gray", "black"}, TilingInstance::all_pairs(2));
    EXPECT_FALSE(search_shading(inst, 1));
    auto s = search_shading(inst, 1, A1 | A2 | B1 | B2);
    ASSERT_TRUE(s);
    auto r = check_shading(inst, *s);
    EXPECT_TRUE(r.passes(A1 | A2 | B1 | B2));
    EXPECT_FALSE(r.b3.pass);
    TilingInstance free({"gray", "black"});
    for (int k = 1; k <= 4; ++k)
        EXPECT_TRUE(search_shading(free, k));
    EXPECT_THROW(search_shading(free, 0), std::invalid_argument);
}
