#include <gtest/gtest.h>

#include <set>

#include "escape/symbol.hpp"

using namespace escape;

namespace
{

// Every symbol listed by hand from the definition of the alphabet.
std::set<std::string> listed_symbols(const std::vector<std::string>& shades)
{
    std::set<std::string> out{"omega"};
    for (std::string k : {"alpha", "x", "y", "$"})
        for (std::string t : {"^C", "^W"})
            out.insert(k + t);
    for (std::string l : {"A", "B"})
        for (std::string o : {"_H", "_V"})
            for (std::string t : {"^C", "^W"})
                for (const auto& s : shades)
                    out.insert(l + o + t + ":" + s);
    return out;
}

}  // namespace

TEST(Alphabet, SizeMatchesListing)
{
    for (std::vector<std::string> shades :
         {std::vector<std::string>{"gray", "black"}, {"gray", "black", "white"}, {"a", "b", "c", "d", "e"}}) {
        Alphabet alpha(shades);
        auto listed = listed_symbols(shades);
        EXPECT_EQ(alpha.size(), listed.size());
        EXPECT_EQ(alpha.label_count(), 2 * listed.size());
        std::set<std::string> produced;
        for (const auto& s : alpha.symbols())
            produced.insert(alpha.text(s));
        EXPECT_EQ(produced, listed);
    }
}

TEST(Alphabet, ShadesSortedAndDeduplicated)
{
    Alphabet alpha({"gray", "black", "gray", "amber"});
    EXPECT_EQ(alpha.shades(), (std::vector<std::string>{"amber", "black", "gray"}));
    EXPECT_EQ(alpha.shade_index("black"), 1);
    EXPECT_FALSE(alpha.shade_index("white"));
    EXPECT_THROW(alpha.require_shade("white"), ParseError);
    EXPECT_THROW(Alphabet({}), std::invalid_argument);
}

TEST(Alphabet, IndexRoundTripAndOrder)
{
    Alphabet alpha({"gray", "black", "white"});
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        auto s = alpha.symbol(i);
        EXPECT_EQ(alpha.index(s), i);
        if (i + 1 < alpha.size())
            EXPECT_LT(s, alpha.symbol(i + 1));
    }
    for (std::size_t i = 0; i < alpha.label_count(); ++i)
        EXPECT_EQ(alpha.index(alpha.label(i)), i);
}

TEST(Alphabet, TextRoundTrip)
{
    Alphabet alpha({"gray", "black"});
    for (std::size_t i = 0; i < alpha.label_count(); ++i) {
        auto l = alpha.label(i);
        EXPECT_EQ(alpha.parse_label(alpha.text(l)), l);
    }
    auto w = alpha.parse_colored_word("G:alpha^C  R:A_H^W:black G:omega");
    ASSERT_EQ(w.size(), 3u);
    EXPECT_EQ(w[1].color, Color::Red);
    EXPECT_EQ(w[1].symbol, Symbol::grid(Letter::A, Orient::H, Temp::Warm, *alpha.shade_index("black")));
    EXPECT_EQ(alpha.text(w), "G:alpha^C R:A_H^W:black G:omega");
}

TEST(Alphabet, ParseErrors)
{
    Alphabet alpha({"gray", "black"});
    for (const char* bad : {"alpha", "alpha^X", "A_H^C:white", "C_H^C:gray", "omega^C", "", "x^Cx"})
        EXPECT_THROW(alpha.parse_symbol(bad), ParseError) << bad;
    EXPECT_THROW(alpha.parse_label("alpha^C"), ParseError);
    EXPECT_THROW(alpha.parse_label("B:alpha^C"), ParseError);
}

TEST(Symbol, TemperatureHelpers)
{
    EXPECT_FALSE(Symbol::omega().has_temp());
    EXPECT_FALSE(Symbol::omega().warm());
    EXPECT_FALSE(Symbol::omega().cold());
    EXPECT_TRUE(Symbol::make(Kind::X, Temp::Warm).warm());
    EXPECT_EQ(opposite(Color::Green), Color::Red);
    EXPECT_EQ(opposite(Temp::Warm), Temp::Cold);
}

TEST(SymbolPattern, MatchCounts)
{
    Alphabet alpha({"gray", "black", "white"});
    auto count = [&](const SymbolPattern& p) {
        std::size_t n = 0;
        for (const auto& s : alpha.symbols())
            n += p.matches(s);
        return n;
    };
    EXPECT_EQ(count(SymbolPattern::any()), alpha.size());
    EXPECT_EQ(count(SymbolPattern::omega()), 1u);
    EXPECT_EQ(count(SymbolPattern::grid(Letter::A, std::nullopt, Temp::Warm)), 6u);
    EXPECT_EQ(count(SymbolPattern::grid(std::nullopt, std::nullopt, std::nullopt)), 24u);
    EXPECT_EQ(count(SymbolPattern::grid(std::nullopt, Orient::V, Temp::Cold, 0)), 2u);
    SymbolPattern warm;
    warm.temp = Temp::Warm;
    EXPECT_EQ(count(warm), 4u + 12u);
}

TEST(Words, PaintAndStrip)
{
    Alphabet alpha({"gray", "black"});
    auto w = alpha.parse_word("alpha^C x^W omega");
    auto red = paint(w, Color::Red);
    for (const auto& l : red)
        EXPECT_EQ(l.color, Color::Red);
    EXPECT_EQ(strip(red), w);
    EXPECT_EQ(alpha.text(w), "alpha^C x^W omega");
}
