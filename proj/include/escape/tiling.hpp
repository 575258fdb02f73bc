#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "escape/symbol.hpp"

namespace escape
{

/// (orientation, shade) label of a grid edge; shade indexes the sorted
/// shade list of the instance.
struct Tile
{
    Orient orient = Orient::H;
    std::uint8_t shade = 0;

    friend auto operator<=>(const Tile&, const Tile&) = default;
};

using ForbiddenPair = std::pair<Tile, Tile>;

class TilingInstance
{
public:
    TilingInstance(std::vector<std::string> shades, std::set<ForbiddenPair> forbidden = {})
        : alphabet_(std::make_shared<const Alphabet>(std::move(shades))), forbidden_(std::move(forbidden))
    {
        if (alphabet_->shade_count() < 2)
            throw std::invalid_argument("an instance needs at least two shades");
        if (!alphabet_->shade_index("gray") || !alphabet_->shade_index("black"))
            throw std::invalid_argument("shade set must contain \"gray\" and \"black\"");
        for (const auto& [c, d] : forbidden_)
            if (c.shade >= alphabet_->shade_count() || d.shade >= alphabet_->shade_count())
                throw std::invalid_argument("forbidden pair uses an unknown shade");
    }

    const AlphabetPtr& alphabet() const { return alphabet_; }
    const std::vector<std::string>& shades() const { return alphabet_->shades(); }
    std::size_t shade_count() const { return alphabet_->shade_count(); }
    std::uint8_t gray() const { return *alphabet_->shade_index("gray"); }
    std::uint8_t black() const { return *alphabet_->shade_index("black"); }
    const std::set<ForbiddenPair>& forbidden() const { return forbidden_; }
    bool is_forbidden(const Tile& c, const Tile& d) const { return forbidden_.count({c, d}) != 0; }

    /// Every pair of (orientation, shade) labels.
    static std::set<ForbiddenPair> all_pairs(std::size_t shade_count)
    {
        std::set<ForbiddenPair> out;
        for (int o1 = 0; o1 < 2; ++o1)
            for (std::size_t s1 = 0; s1 < shade_count; ++s1)
                for (int o2 = 0; o2 < 2; ++o2)
                    for (std::size_t s2 = 0; s2 < shade_count; ++s2)
                        out.insert({{Orient(o1), std::uint8_t(s1)}, {Orient(o2), std::uint8_t(s2)}});
        return out;
    }

private:
    AlphabetPtr alphabet_;
    std::set<ForbiddenPair> forbidden_;
};

/// Edge of the [k]x[k] grid: from (i, j) rightwards (H) or upwards (V).
struct GridEdge
{
    int i = 0;
    int j = 0;
    Orient dir = Orient::H;

    std::pair<int, int> from() const { return {i, j}; }
    std::pair<int, int> to() const { return dir == Orient::H ? std::pair{i + 1, j} : std::pair{i, j + 1}; }
    friend auto operator<=>(const GridEdge&, const GridEdge&) = default;
};

/// Labels for every edge of the square grid with vertices [0,k]^2.
class GridShading
{
public:
    GridShading() = default;
    explicit GridShading(int k, Tile fill = {}) : k_(k)
    {
        if (k < 1)
            throw std::invalid_argument("grid side must be at least 1");
        labels_.assign(edge_count(), fill);
        for (std::size_t e = 0; e < labels_.size(); ++e)
            labels_[e].orient = edge(e).dir;
    }

    int k() const { return k_; }
    std::size_t edge_count() const { return static_cast<std::size_t>(2 * k_ * (k_ + 1)); }

    // Row-major: for each row j, its horizontal edges, then the vertical
    // edges leaving that row.
    GridEdge edge(std::size_t e) const
    {
        const auto per_row = static_cast<std::size_t>(2 * k_ + 1);
        auto j = static_cast<int>(e / per_row);
        auto r = static_cast<int>(e % per_row);
        if (r < k_)
            return {r, j, Orient::H};
        return {r - k_, j, Orient::V};
    }

    std::optional<std::size_t> index(const GridEdge& g) const
    {
        if (g.i < 0 || g.j < 0)
            return std::nullopt;
        if (g.dir == Orient::H) {
            if (g.i >= k_ || g.j > k_)
                return std::nullopt;
            return static_cast<std::size_t>(g.j * (2 * k_ + 1) + g.i);
        }
        if (g.i > k_ || g.j >= k_)
            return std::nullopt;
        return static_cast<std::size_t>(g.j * (2 * k_ + 1) + k_ + g.i);
    }

    bool contains(const GridEdge& g) const { return index(g).has_value(); }
    const Tile& at(const GridEdge& g) const { return labels_.at(*index(g)); }
    Tile& at(const GridEdge& g) { return labels_.at(*index(g)); }
    const Tile& operator[](std::size_t e) const { return labels_.at(e); }
    Tile& operator[](std::size_t e) { return labels_.at(e); }

    friend bool operator==(const GridShading&, const GridShading&) = default;

private:
    int k_ = 0;
    std::vector<Tile> labels_;
};

enum Condition : unsigned { A1 = 1, A2 = 2, B1 = 4, B2 = 8, B3 = 16, AllConditions = 31 };

struct ConditionResult
{
    bool pass = true;
    std::string witness;
};

struct ShadingReport
{
    ConditionResult a1, a2, b1, b2, b3;

    const ConditionResult& get(Condition c) const
    {
        switch (c) {
        case A1: return a1;
        case A2: return a2;
        case B1: return b1;
        case B2: return b2;
        default: return b3;
        }
    }

    bool passes(unsigned conditions) const
    {
        for (auto c : {A1, A2, B1, B2, B3})
            if ((conditions & c) && !get(c).pass)
                return false;
        return true;
    }

    bool proper() const { return passes(AllConditions); }
};

namespace detail
{

inline std::string describe(const GridEdge& g)
{
    auto [x, y] = g.to();
    return "(" + std::to_string(g.i) + "," + std::to_string(g.j) + ")->(" + std::to_string(x) + "," +
           std::to_string(y) + ")";
}

/// Edges entering vertex (i, j).
inline std::vector<GridEdge> incoming(const GridShading& s, int i, int j)
{
    std::vector<GridEdge> out;
    for (GridEdge g : {GridEdge{i - 1, j, Orient::H}, GridEdge{i, j - 1, Orient::V}})
        if (s.contains(g))
            out.push_back(g);
    return out;
}

inline std::vector<GridEdge> outgoing(const GridShading& s, int i, int j)
{
    std::vector<GridEdge> out;
    for (GridEdge g : {GridEdge{i, j, Orient::H}, GridEdge{i, j, Orient::V}})
        if (s.contains(g))
            out.push_back(g);
    return out;
}

}  // namespace detail

inline ShadingReport check_shading(const TilingInstance& inst, const GridShading& s)
{
    ShadingReport r;
    const auto& names = inst.shades();
    for (std::size_t e = 0; e < s.edge_count(); ++e) {
        auto g = s.edge(e);
        if (s[e].shade >= names.size())
            throw std::invalid_argument("shading uses an unknown shade");
        auto& cond = g.dir == Orient::H ? r.a1 : r.a2;
        if (cond.pass && s[e].orient != g.dir) {
            cond.pass = false;
            cond.witness = detail::describe(g) + " carries the wrong orientation";
        }
    }
    if (s.at({0, 0, Orient::H}).shade != inst.gray()) {
        r.b1.pass = false;
        r.b1.witness = "bottom-left horizontal edge is " + names[s.at({0, 0, Orient::H}).shade];
    }
    GridEdge top{s.k(), s.k() - 1, Orient::V};
    if (s.at(top).shade != inst.black()) {
        r.b2.pass = false;
        r.b2.witness = "upper-right vertical edge is " + names[s.at(top).shade];
    }
    for (std::size_t e = 0; e < s.edge_count() && r.b3.pass; ++e) {
        auto first = s.edge(e);
        auto [x, y] = first.to();
        for (const auto& second : detail::outgoing(s, x, y))
            if (inst.is_forbidden(s[e], s.at(second))) {
                r.b3.pass = false;
                r.b3.witness = "forbidden 2-path " + detail::describe(first) + " then " + detail::describe(second);
                break;
            }
    }
    return r;
}

/// Backtracking over edge shades in row-major order. Orientations are the
/// axis-correct ones, so (a1) and (a2) always hold for returned witnesses.
inline std::optional<GridShading> search_shading(const TilingInstance& inst, int k, unsigned conditions = AllConditions)
{
    if (k < 1)
        throw std::invalid_argument("grid side must be at least 1");
    GridShading s(k);
    const auto n = s.edge_count();
    const GridEdge bottom{0, 0, Orient::H}, top{k, k - 1, Orient::V};
    std::vector<char> assigned(n, 0);

    // Only checks pairs whose both edges are assigned; the later edge of
    // every 2-path triggers the check.
    auto consistent = [&](std::size_t e) {
        if (!(conditions & B3))
            return true;
        auto g = s.edge(e);
        for (const auto& p : detail::incoming(s, g.i, g.j)) {
            auto pi = *s.index(p);
            if (assigned[pi] && inst.is_forbidden(s[pi], s[e]))
                return false;
        }
        auto [x, y] = g.to();
        for (const auto& q : detail::outgoing(s, x, y)) {
            auto qi = *s.index(q);
            if (assigned[qi] && inst.is_forbidden(s[e], s[qi]))
                return false;
        }
        return true;
    };

    auto rec = [&](auto&& self, std::size_t e) -> bool {
        if (e == n)
            return true;
        auto g = s.edge(e);
        for (std::uint8_t shade = 0; shade < inst.shade_count(); ++shade) {
            if ((conditions & B1) && g == bottom && shade != inst.gray())
                continue;
            if ((conditions & B2) && g == top && shade != inst.black())
                continue;
            s[e] = {g.dir, shade};
            assigned[e] = 1;
            if (consistent(e) && self(self, e + 1))
                return true;
            assigned[e] = 0;
        }
        return false;
    };
    if (!rec(rec, 0))
        return std::nullopt;
    return s;
}

}  // namespace escape
