#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "escape/chase.hpp"
#include "escape/language.hpp"
#include "escape/structure.hpp"
#include "escape/tiling.hpp"

namespace escape
{

enum class Group : std::uint8_t { Good, Bad, Ugly };

inline const char* group_name(Group g)
{
    switch (g) {
    case Group::Good: return "good";
    case Group::Bad: return "bad";
    case Group::Ugly: return "ugly";
    }
    return "?";
}

struct NamedLanguage
{
    std::string name;  // good1..good15, bad0.., ugly1..ugly3
    Group group = Group::Good;
    int number = 0;    // 1-based for good/ugly, 0-based for bad
    std::string description;
    PathLanguage language;
};

/// The view languages Q (good, then bad, then ugly), Q_start and Q0 built
/// from a tiling instance.
struct ReductionOutput
{
    AlphabetPtr alphabet;
    std::vector<NamedLanguage> languages;
    PathLanguage q_start;
    PathLanguage q0;

    std::size_t good_count() const { return count(Group::Good); }
    std::size_t bad_count() const { return count(Group::Bad); }
    std::size_t ugly_count() const { return count(Group::Ugly); }

    std::size_t count(Group g) const
    {
        std::size_t n = 0;
        for (const auto& l : languages)
            n += l.group == g;
        return n;
    }

    /// Position in `languages` of the given group member.
    std::size_t index_of(Group g, int number) const
    {
        for (std::size_t i = 0; i < languages.size(); ++i)
            if (languages[i].group == g && languages[i].number == number)
                return i;
        throw std::out_of_range(std::string("no language ") + group_name(g) + std::to_string(number));
    }

    std::size_t index_of(std::string_view name) const
    {
        for (std::size_t i = 0; i < languages.size(); ++i)
            if (languages[i].name == name)
                return i;
        throw std::out_of_range("no language named '" + std::string(name) + "'");
    }

    const PathLanguage& good(int n) const { return languages[index_of(Group::Good, n)].language; }
    const PathLanguage& ugly(int n) const { return languages[index_of(Group::Ugly, n)].language; }
    const PathLanguage& bad(int n) const { return languages[index_of(Group::Bad, n)].language; }

    std::vector<PathLanguage> q() const
    {
        std::vector<PathLanguage> out;
        for (const auto& l : languages)
            out.push_back(l.language);
        return out;
    }

    std::vector<PathLanguage> group(Group g) const
    {
        std::vector<PathLanguage> out;
        for (const auto& l : languages)
            if (l.group == g)
                out.push_back(l.language);
        return out;
    }

    std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        for (const auto& l : languages)
            out.push_back(l.name);
        return out;
    }

    /// Q<->: constraint 2i is languages[i]->, 2i+1 is languages[i]<-.
    ConstraintSet constraints() const { return both_directions(q(), names()); }
};

namespace detail
{

struct LangKit
{
    AlphabetPtr alpha;

    PathLanguage sym(Kind k, Temp t) const { return from_pattern(alpha, SymbolPattern::plain(k, t)); }
    PathLanguage omega() const { return from_pattern(alpha, SymbolPattern::omega()); }
    PathLanguage grid(std::optional<Letter> l, std::optional<Orient> o, std::optional<Temp> t,
                      std::optional<std::uint8_t> s = std::nullopt) const
    {
        return from_pattern(alpha, SymbolPattern::grid(l, o, t, s));
    }
    PathLanguage both(Kind k) const { return unite(sym(k, Temp::Cold), sym(k, Temp::Warm)); }
};

}  // namespace detail

inline ReductionOutput reduce(const TilingInstance& inst)
{
    using L = Letter;
    using O = Orient;
    constexpr auto C = Temp::Cold;
    constexpr auto W = Temp::Warm;
    ReductionOutput out;
    out.alphabet = inst.alphabet();
    detail::LangKit k{inst.alphabet()};
    auto any_cold_grid = k.grid(std::nullopt, std::nullopt, C);

    auto good = [&](int n, std::string desc, PathLanguage l) {
        out.languages.push_back({"good" + std::to_string(n), Group::Good, n, std::move(desc), std::move(l)});
    };
    good(1, "omega", k.omega());
    good(2, "alpha^C + alpha^W", k.both(Kind::Alpha));
    good(3, "x^C + x^W", k.both(Kind::X));
    good(4, "y^C + y^W", k.both(Kind::Y));
    good(5, "$^C + $^W", k.both(Kind::Dollar));
    good(6, "B_V^C + B_V^W", unite(k.grid(L::B, O::V, C), k.grid(L::B, O::V, W)));
    good(7, "B_H^W + B_H^C", unite(k.grid(L::B, O::H, W), k.grid(L::B, O::H, C)));
    good(8, "A_V^W + A_V^C", unite(k.grid(L::A, O::V, W), k.grid(L::A, O::V, C)));
    good(9, "A_H^C + A_H^W", unite(k.grid(L::A, O::H, C), k.grid(L::A, O::H, W)));
    good(10, "B_H^W A_V^W + B_V^C A_H^C",
         unite(concat(k.grid(L::B, O::H, W), k.grid(L::A, O::V, W)),
               concat(k.grid(L::B, O::V, C), k.grid(L::A, O::H, C))));
    good(11, "A_H^C B_V^C + A_V^W B_H^W",
         unite(concat(k.grid(L::A, O::H, C), k.grid(L::B, O::V, C)),
               concat(k.grid(L::A, O::V, W), k.grid(L::B, O::H, W))));
    good(12, "x^C (A_H^C + B_H^C + A_V^C + B_V^C) + x^C + x^W",
         unite({concat(k.sym(Kind::X, C), any_cold_grid), k.sym(Kind::X, C), k.sym(Kind::X, W)}));
    good(13, "(A_H^C + B_H^C + A_V^C + B_V^C) y^C + y^C + y^W",
         unite({concat(any_cold_grid, k.sym(Kind::Y, C)), k.sym(Kind::Y, C), k.sym(Kind::Y, W)}));
    good(14, "x^W + x^C + x^C A_H^C B_V^C",
         unite({k.sym(Kind::X, W), k.sym(Kind::X, C),
                concat({k.sym(Kind::X, C), k.grid(L::A, O::H, C), k.grid(L::B, O::V, C)})}));
    good(15, "y^W + $^C + A_H^C B_V^C y^C + B_V^C y^C",
         unite({k.sym(Kind::Y, W), k.sym(Kind::Dollar, C),
                concat({k.grid(L::A, O::H, C), k.grid(L::B, O::V, C), k.sym(Kind::Y, C)}),
                concat(k.grid(L::B, O::V, C), k.sym(Kind::Y, C))}));

    const auto& shades = inst.shades();
    int bad_no = 0;
    auto orient_name = [](Orient o) { return o == Orient::H ? "H" : "V"; };
    for (const auto& [c, d] : inst.forbidden()) {
        auto l = concat({k.sym(Kind::Alpha, W), k.sym(Kind::X, W), k.grid(std::nullopt, c.orient, W, c.shade),
                         k.grid(std::nullopt, d.orient, W, d.shade), k.sym(Kind::Y, W), k.omega()});
        std::string desc = std::string("forbidden pair (") + orient_name(c.orient) + "," + shades[c.shade] + ")(" +
                           orient_name(d.orient) + "," + shades[d.shade] + ")";
        out.languages.push_back({"bad" + std::to_string(bad_no), Group::Bad, bad_no, desc, std::move(l)});
        ++bad_no;
    }
    for (std::uint8_t s = 0; s < inst.shade_count(); ++s) {
        if (s == inst.black())
            continue;
        auto l = concat({k.sym(Kind::Alpha, W), k.sym(Kind::X, W), k.grid(L::B, O::V, W, s), k.sym(Kind::Dollar, W),
                         k.omega()});
        out.languages.push_back({"bad" + std::to_string(bad_no), Group::Bad, bad_no,
                                 "dollar after non-black vertical (" + shades[s] + ")", std::move(l)});
        ++bad_no;
    }

    auto upto4 = sigma_upto(inst.alphabet(), 4);
    auto ugly_temp = [&](Temp first, Temp middle) {
        auto head = concat_optional(k.sym(Kind::Alpha, first), upto4, k.grid(std::nullopt, std::nullopt, middle));
        return concat_optional(head, upto4, k.omega());
    };
    out.languages.push_back({"ugly1", Group::Ugly, 1, "alpha^C S<=4 warm S<=4 omega", ugly_temp(C, W)});
    out.languages.push_back({"ugly2", Group::Ugly, 2, "alpha^W S<=4 cold S<=4 omega", ugly_temp(W, C)});
    out.languages.push_back({"ugly3", Group::Ugly, 3, "alpha^C x^C B_V^C B_V^C y^C omega",
                             concat({k.sym(Kind::Alpha, C), k.sym(Kind::X, C), k.grid(L::B, O::V, C),
                                     k.grid(L::B, O::V, C), k.sym(Kind::Y, C), k.omega()})});

    out.q_start = concat({k.sym(Kind::Alpha, C), k.sym(Kind::X, C), k.grid(L::A, O::H, C, inst.gray()),
                          k.grid(L::B, O::V, C), k.sym(Kind::Y, C), k.omega()});
    out.q0 = out.q_start;
    for (const auto& l : out.languages)
        if (l.group != Group::Good)
            out.q0 = unite(out.q0, l.language);
    return out;
}

// --- fixtures ------------------------------------------------------------------

/// Shade source for fixture grid edges: a shading where it covers the edge,
/// gray elsewhere.
struct ShadeSource
{
    const TilingInstance* inst = nullptr;
    const GridShading* shading = nullptr;

    std::uint8_t operator()(const GridEdge& g) const
    {
        if (shading && shading->contains(g))
            return shading->at(g).shade;
        return inst->gray();
    }
};

inline std::string grid_vertex_name(int i, int j) { return "v" + std::to_string(i) + "," + std::to_string(j); }

namespace detail
{

// a, a', b', b plus grid vertices selected by `keep`, with the x/y fans,
// grid edges between kept vertices and the alpha/omega end edges.
inline Structure grid_like(int m, const std::function<bool(int, int)>& keep, bool dollar, ShadeSource shade)
{
    Structure s("a", "b");
    auto a1 = s.add_vertex("a'");
    auto b1 = s.add_vertex("b'");
    auto pair = [&](VertexId u, VertexId v, Symbol cold) {
        Symbol warm = cold;
        warm.temp = Temp::Warm;
        s.add_edge(u, v, {cold, Color::Green});
        s.add_edge(u, v, {warm, Color::Red});
    };
    pair(s.a(), a1, Symbol::make(Kind::Alpha, Temp::Cold));
    s.add_edge(b1, s.b(), {Symbol::omega(), Color::Green});
    s.add_edge(b1, s.b(), {Symbol::omega(), Color::Red});

    std::map<std::pair<int, int>, VertexId> at;
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i)
            if (keep(i, j))
                at[{i, j}] = s.add_vertex(grid_vertex_name(i, j));
    for (const auto& [ij, v] : at) {
        pair(a1, v, Symbol::make(Kind::X, Temp::Cold));
        pair(v, b1, Symbol::make(Kind::Y, Temp::Cold));
        auto [i, j] = ij;
        Letter letter = (i + j) % 2 == 0 ? Letter::A : Letter::B;
        for (GridEdge g : {GridEdge{i, j, Orient::H}, GridEdge{i, j, Orient::V}}) {
            auto it = at.find(g.to());
            if (it == at.end())
                continue;
            pair(v, it->second, Symbol::grid(letter, g.dir, Temp::Cold, shade(g)));
        }
    }
    if (dollar) {
        auto top = at.at({m, m});
        pair(top, b1, Symbol::make(Kind::Dollar, Temp::Cold));
    }
    return s;
}

inline void require_size(int m) { if (m < 1) throw std::invalid_argument("fixture size must be at least 1"); }

}  // namespace detail

/// P_m: the staircase v_0 .. v_2m, named by grid coordinates
/// (v_2i = (i,i), v_2i+1 = (i+1,i)).
inline Structure build_P(const TilingInstance& inst, int m, const GridShading* shading = nullptr, bool dollar = false)
{
    detail::require_size(m);
    auto keep = [](int i, int j) { return i == j || i == j + 1; };
    return detail::grid_like(m, keep, dollar, {&inst, shading});
}

inline Structure build_P_dollar(const TilingInstance& inst, int m, const GridShading* shading = nullptr)
{
    return build_P(inst, m, shading, true);
}

inline Structure build_L(const TilingInstance& inst, int m, int k, const GridShading* shading = nullptr,
                         bool dollar = false)
{
    detail::require_size(m);
    if (k < 0 || k > m)
        throw std::invalid_argument("band width must satisfy 0 <= k <= m");
    auto keep = [k](int i, int j) { return std::abs(i - j) <= k; };
    return detail::grid_like(m, keep, dollar, {&inst, shading});
}

inline Structure build_L_dollar(const TilingInstance& inst, int m, int k, const GridShading* shading = nullptr)
{
    return build_L(inst, m, k, shading, true);
}

inline Structure build_G(const TilingInstance& inst, int m, const GridShading* shading = nullptr)
{
    detail::require_size(m);
    return detail::grid_like(m, [](int, int) { return true; }, false, {&inst, shading});
}

inline Structure build_G_dollar(const TilingInstance& inst, int m, const GridShading* shading = nullptr)
{
    detail::require_size(m);
    return detail::grid_like(m, [](int, int) { return true; }, true, {&inst, shading});
}

/// D_0 for the Q_start word with the given shade on its vertical edge.
inline ColoredWord start_word(const TilingInstance& inst, std::uint8_t vertical_shade)
{
    Word w{Symbol::make(Kind::Alpha, Temp::Cold), Symbol::make(Kind::X, Temp::Cold),
           Symbol::grid(Letter::A, Orient::H, Temp::Cold, inst.gray()),
           Symbol::grid(Letter::B, Orient::V, Temp::Cold, vertical_shade), Symbol::make(Kind::Y, Temp::Cold),
           Symbol::omega()};
    return paint(w, Color::Green);
}

// --- Crocodile strategies ----------------------------------------------------

/// Sequences of good-language numbers (1..15).
using StrategySequence = std::vector<int>;

namespace strategies
{

inline StrategySequence operator+(StrategySequence x, const StrategySequence& y)
{
    x.insert(x.end(), y.begin(), y.end());
    return x;
}

inline StrategySequence color() { return {3, 4, 5, 6, 7, 8, 9}; }
inline StrategySequence cycle() { return StrategySequence{15, 14} + color() + StrategySequence{12, 13} + color(); }
inline StrategySequence start() { return StrategySequence{1, 2} + cycle(); }

inline StrategySequence stage(int k)
{
    if (k < 1)
        throw std::invalid_argument("S_k needs k >= 1");
    auto s = start();
    for (int i = 1; i < k; ++i)
        s = s + cycle();
    return s;
}

inline StrategySequence odd() { return StrategySequence{11} + color() + StrategySequence{12, 13} + color(); }
inline StrategySequence even() { return StrategySequence{10} + color() + StrategySequence{12, 13} + color(); }

inline StrategySequence layer(int k)
{
    if (k < 0)
        throw std::invalid_argument("S_layer needs k >= 0");
    StrategySequence s;
    for (int i = 1; i <= k; ++i)
        s = s + (i % 2 == 1 ? odd() : even());
    return s;
}

/// Looks up S_color, S_cycle, S_start, S_odd, S_even, S_k:<k>, S_layer:<k>.
inline std::optional<StrategySequence> by_name(std::string_view name)
{
    auto arg = [&](std::string_view prefix) -> std::optional<int> {
        if (name.substr(0, prefix.size()) != prefix)
            return std::nullopt;
        return std::stoi(std::string(name.substr(prefix.size())));
    };
    if (name == "S_color")
        return color();
    if (name == "S_cycle")
        return cycle();
    if (name == "S_start")
        return start();
    if (name == "S_odd")
        return odd();
    if (name == "S_even")
        return even();
    if (auto k = arg("S_k:"))
        return stage(*k);
    if (auto k = arg("S_layer:"))
        return layer(*k);
    return std::nullopt;
}

}  // namespace strategies

// --- counterexample ------------------------------------------------------------

struct ImproperShading : std::invalid_argument
{
    ShadingReport report;
    ImproperShading(std::string what, ShadingReport r) : std::invalid_argument(std::move(what)), report(std::move(r)) {}
};

struct Assembly
{
    Structure structure;
    Verdict verdict;
};

/// Shaded G_k$ for a proper shading of side k, validated against reduce(inst).
inline Assembly assemble_counterexample(const TilingInstance& inst, const GridShading& s)
{
    auto report = check_shading(inst, s);
    if (!report.proper()) {
        std::string why = "shading is not proper:";
        for (auto c : {A1, A2, B1, B2, B3})
            if (!report.get(c).pass)
                why += " " + report.get(c).witness + ";";
        throw ImproperShading(why, report);
    }
    Assembly out{build_G_dollar(inst, s.k(), &s), {}};
    auto red = reduce(inst);
    out.verdict = validate_counterexample(out.structure, red.constraints(), red.q0);
    return out;
}

}  // namespace escape
