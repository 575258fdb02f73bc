#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "escape/symbol.hpp"

namespace escape
{

using VertexId = std::uint32_t;

struct Edge
{
    VertexId src = 0;
    VertexId dst = 0;
    EdgeLabel label;

    friend bool operator==(const Edge& x, const Edge& y)
    {
        return x.src == y.src && x.dst == y.dst && x.label == y.label;
    }
    friend bool operator<(const Edge& x, const Edge& y)
    {
        if (x.src != y.src)
            return x.src < y.src;
        if (x.dst != y.dst)
            return x.dst < y.dst;
        return x.label < y.label;
    }
};

struct Arc
{
    VertexId other;
    EdgeLabel label;
};

// Finite directed edge-labeled multigraph with constants a and b.
// Vertex ids are dense: every id in [0, vertex_count()) is a vertex and ids
// are never reused. Identical labeled edges are stored once.
class Structure
{
public:
    Structure() : Structure("a", "b") {}

    Structure(std::string a_name, std::string b_name)
    {
        a_ = add_vertex(std::move(a_name));
        b_ = add_vertex(std::move(b_name));
    }

    VertexId a() const { return a_; }
    VertexId b() const { return b_; }

    std::size_t vertex_count() const { return out_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool has_vertex(VertexId v) const { return v < out_.size(); }

    /// Bumped by every mutation; eval caches key on it.
    std::uint64_t version() const { return version_; }

    VertexId add_vertex(std::string name = {})
    {
        auto id = static_cast<VertexId>(out_.size());
        out_.emplace_back();
        in_.emplace_back();
        names_.push_back(std::move(name));
        ++version_;
        return id;
    }

    bool add_edge(VertexId u, VertexId v, EdgeLabel l)
    {
        if (!has_vertex(u) || !has_vertex(v))
            throw std::out_of_range("edge endpoint is not a vertex");
        if (!edges_.insert(Edge{u, v, l}).second)
            return false;
        out_[u].push_back({v, l});
        in_[v].push_back({u, l});
        ++version_;
        return true;
    }

    bool has_edge(VertexId u, VertexId v, EdgeLabel l) const { return edges_.count(Edge{u, v, l}) != 0; }

    const std::set<Edge>& edges() const { return edges_; }
    std::span<const Arc> out(VertexId v) const { return out_.at(v); }
    std::span<const Arc> in(VertexId v) const { return in_.at(v); }
    std::size_t degree(VertexId v) const { return out_.at(v).size() + in_.at(v).size(); }

    const std::string& name(VertexId v) const { return names_.at(v); }
    void set_name(VertexId v, std::string n) { names_.at(v) = std::move(n); }

    std::string display_name(VertexId v) const
    {
        return names_.at(v).empty() ? std::to_string(v) : names_[v];
    }

    std::optional<VertexId> find(std::string_view n) const
    {
        for (VertexId v = 0; v < names_.size(); ++v)
            if (names_[v] == n)
                return v;
        return std::nullopt;
    }

    VertexId require(std::string_view n) const
    {
        auto v = find(n);
        if (!v)
            throw std::out_of_range("no vertex named '" + std::string(n) + "'");
        return *v;
    }

    /// Appends the frozen body of `word` between u and v. Returns the
    /// fresh intermediate vertices in path order.
    std::vector<VertexId> append_path(std::span<const EdgeLabel> word, VertexId u, VertexId v,
                                      std::span<const std::string> names = {})
    {
        if (word.empty())
            throw std::invalid_argument("cannot freeze the empty word");
        if (!has_vertex(u) || !has_vertex(v))
            throw std::out_of_range("path endpoint is not a vertex");
        std::vector<VertexId> fresh;
        VertexId cur = u;
        for (std::size_t i = 0; i + 1 < word.size(); ++i) {
            auto s = add_vertex(i < names.size() ? names[i] : std::string{});
            fresh.push_back(s);
            add_edge(cur, s, word[i]);
            cur = s;
        }
        add_edge(cur, v, word.back());
        return fresh;
    }

    /// Copy with every grid shade replaced by shade 0.
    Structure erase_shades() const
    {
        Structure out = *this;
        out.edges_.clear();
        for (auto& arcs : out.out_)
            arcs.clear();
        for (auto& arcs : out.in_)
            arcs.clear();
        for (auto e : edges_) {
            e.label.symbol.shade = 0;
            out.add_edge(e.src, e.dst, e.label);
        }
        return out;
    }

    /// FNV-1a over ids, names and labeled edges.
    std::uint64_t hash() const
    {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&](std::uint64_t x) {
            for (int i = 0; i < 8; ++i) {
                h ^= (x >> (8 * i)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        mix(vertex_count());
        mix(a_);
        mix(b_);
        for (const auto& n : names_) {
            for (char c : n)
                mix(static_cast<unsigned char>(c));
            mix(0xfe);
        }
        for (const auto& e : edges_) {
            mix(e.src);
            mix(e.dst);
            mix(e.label.symbol.order_key());
            mix(static_cast<std::uint64_t>(e.label.color));
        }
        return h;
    }

    /// Exact equality: same ids, constants, names and labeled edges.
    friend bool operator==(const Structure& x, const Structure& y)
    {
        return x.a_ == y.a_ && x.b_ == y.b_ && x.names_ == y.names_ && x.edges_ == y.edges_;
    }

private:
    VertexId a_ = 0;
    VertexId b_ = 0;
    std::vector<std::vector<Arc>> out_;
    std::vector<std::vector<Arc>> in_;
    std::vector<std::string> names_;
    std::set<Edge> edges_;
    std::uint64_t version_ = 0;
};

/// host extended with a fresh path u -> ... -> v carrying `word`.
inline Structure freeze(std::span<const EdgeLabel> word, VertexId u, VertexId v, const Structure& host)
{
    Structure out = host;
    out.append_path(word, u, v);
    return out;
}

/// The frozen body word[a,b] on a structure with only a and b.
inline Structure frozen_body(std::span<const EdgeLabel> word)
{
    Structure s;
    s.append_path(word, s.a(), s.b());
    return s;
}

/// Compares structures by vertex names instead of ids. Every vertex of both
/// structures must carry a distinct name.
inline bool equal_by_names(const Structure& x, const Structure& y, std::string* why = nullptr)
{
    auto edge_set = [](const Structure& s) {
        std::set<std::tuple<std::string, std::string, EdgeLabel>> out;
        for (const auto& e : s.edges())
            out.insert({s.display_name(e.src), s.display_name(e.dst), e.label});
        return out;
    };
    auto names = [](const Structure& s) {
        std::set<std::string> out;
        for (VertexId v = 0; v < s.vertex_count(); ++v)
            out.insert(s.display_name(v));
        return out;
    };
    auto fail = [&](std::string msg) {
        if (why)
            *why = std::move(msg);
        return false;
    };
    auto nx = names(x), ny = names(y);
    if (nx.size() != x.vertex_count() || ny.size() != y.vertex_count())
        return fail("vertex names are not unique");
    if (nx != ny) {
        std::ostringstream os;
        os << "vertex sets differ:";
        for (const auto& n : nx)
            if (!ny.count(n))
                os << " -" << n;
        for (const auto& n : ny)
            if (!nx.count(n))
                os << " +" << n;
        return fail(os.str());
    }
    if (x.display_name(x.a()) != y.display_name(y.a()) || x.display_name(x.b()) != y.display_name(y.b()))
        return fail("constants differ");
    auto ex = edge_set(x), ey = edge_set(y);
    if (ex != ey) {
        std::ostringstream os;
        os << "edge sets differ (" << ex.size() << " vs " << ey.size() << ")";
        std::size_t shown = 0;
        for (const auto& e : ex)
            if (!ey.count(e) && shown++ < 5)
                os << "; only left " << std::get<0>(e) << "->" << std::get<1>(e);
        for (const auto& e : ey)
            if (!ex.count(e) && shown++ < 10)
                os << "; only right " << std::get<0>(e) << "->" << std::get<1>(e);
        return fail(os.str());
    }
    return true;
}

}  // namespace escape
