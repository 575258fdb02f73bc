#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "escape/structure.hpp"

namespace escape
{

/// Partial function between vertex id spaces.
class VertexMap
{
public:
    static constexpr VertexId unmapped = std::numeric_limits<VertexId>::max();

    VertexMap() = default;
    explicit VertexMap(std::size_t source_size) : to_(source_size, unmapped) {}

    /// Throws std::invalid_argument when a source vertex is mapped twice
    /// to different targets.
    static VertexMap from_pairs(std::size_t source_size, const std::vector<std::pair<VertexId, VertexId>>& pairs)
    {
        VertexMap m(source_size);
        for (auto [s, t] : pairs) {
            if (s >= source_size)
                throw std::invalid_argument("seed maps a vertex outside the source");
            if (m.to_[s] != unmapped && m.to_[s] != t)
                throw std::invalid_argument("seed maps vertex " + std::to_string(s) + " twice");
            m.to_[s] = t;
        }
        return m;
    }

    std::size_t size() const { return to_.size(); }
    void resize(std::size_t n) { to_.resize(n, unmapped); }
    bool mapped(VertexId v) const { return v < to_.size() && to_[v] != unmapped; }
    VertexId operator()(VertexId v) const { return to_.at(v); }
    void set(VertexId v, VertexId t)
    {
        if (v >= to_.size())
            to_.resize(v + 1, unmapped);
        to_[v] = t;
    }

    bool total() const
    {
        return std::none_of(to_.begin(), to_.end(), [](VertexId t) { return t == unmapped; });
    }

    /// True when every mapping of `smaller` is also in *this.
    bool extends(const VertexMap& smaller) const
    {
        for (VertexId v = 0; v < smaller.size(); ++v)
            if (smaller.mapped(v) && (!mapped(v) || to_[v] != smaller.to_[v]))
                return false;
        return true;
    }

    const std::vector<VertexId>& raw() const { return to_; }

    friend bool operator==(const VertexMap&, const VertexMap&) = default;

private:
    std::vector<VertexId> to_;
};

/// Checks the homomorphism definition edge by edge, including a->a, b->b
/// and totality. On failure `why` names the first offending item.
inline bool is_homomorphism(const Structure& source, const Structure& target, const VertexMap& h,
                            std::string* why = nullptr)
{
    auto fail = [&](std::string msg) {
        if (why)
            *why = std::move(msg);
        return false;
    };
    if (h.size() < source.vertex_count())
        return fail("map shorter than the source vertex set");
    for (VertexId v = 0; v < source.vertex_count(); ++v) {
        if (!h.mapped(v))
            return fail("vertex " + std::to_string(v) + " unmapped");
        if (!target.has_vertex(h(v)))
            return fail("vertex " + std::to_string(v) + " mapped outside the target");
    }
    if (h(source.a()) != target.a() || h(source.b()) != target.b())
        return fail("constants not preserved");
    for (const auto& e : source.edges())
        if (!target.has_edge(h(e.src), h(e.dst), e.label))
            return fail("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) + " has no image");
    return true;
}

namespace detail
{

class Bits
{
public:
    Bits() = default;
    explicit Bits(std::size_t n, bool fill = false) : n_(n), w_((n + 63) / 64, fill ? ~0ull : 0ull)
    {
        if (fill && n % 64)
            w_.back() = (1ull << (n % 64)) - 1;
    }
    void set(std::size_t i) { w_[i / 64] |= 1ull << (i % 64); }
    void reset(std::size_t i) { w_[i / 64] &= ~(1ull << (i % 64)); }
    bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1; }
    bool allocated() const { return !w_.empty(); }
    void or_with(const Bits& o)
    {
        for (std::size_t i = 0; i < w_.size(); ++i)
            w_[i] |= o.w_[i];
    }
    void and_with(const Bits& o)
    {
        for (std::size_t i = 0; i < w_.size(); ++i)
            w_[i] &= o.w_[i];
    }
    bool none() const
    {
        return std::all_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x == 0; });
    }
    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto x : w_)
            c += static_cast<std::size_t>(__builtin_popcountll(x));
        return c;
    }
    template <class F>
    void for_each(F&& f) const
    {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            auto x = w_[i];
            while (x) {
                auto bit = static_cast<std::size_t>(__builtin_ctzll(x));
                f(i * 64 + bit);
                x &= x - 1;
            }
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

class HomSearch
{
public:
    HomSearch(const Structure& source, const Structure& target, bool injective)
        : src_(source), tgt_(target), injective_(injective), n_(source.vertex_count()), m_(target.vertex_count())
    {
    }

    std::optional<VertexMap> run(const VertexMap& seed)
    {
        std::vector<Bits> dom(n_, Bits(m_));
        for (VertexId v = 0; v < n_; ++v) {
            if (seed.mapped(v)) {
                if (seed(v) < m_ && compatible(v, seed(v)))
                    dom[v].set(seed(v));
                continue;
            }
            for (VertexId t = 0; t < m_; ++t)
                if (compatible(v, t))
                    dom[v].set(t);
        }
        order_ = make_order(seed);
        assign_.assign(n_, VertexMap::unmapped);
        if (!search(0, dom))
            return std::nullopt;
        VertexMap out(n_);
        for (VertexId v = 0; v < n_; ++v)
            out.set(v, assign_[v]);
        return out;
    }

private:
    // Every out-label of v must be an out-label of t, likewise for in-labels.
    bool compatible(VertexId v, VertexId t) const
    {
        auto covers = [](std::span<const Arc> need, std::span<const Arc> have) {
            for (const auto& arc : need) {
                bool found = std::any_of(have.begin(), have.end(),
                                         [&](const Arc& h) { return h.label == arc.label; });
                if (!found)
                    return false;
            }
            return true;
        };
        return covers(src_.out(v), tgt_.out(t)) && covers(src_.in(v), tgt_.in(t));
    }

    // Seeded vertices first; then repeatedly the vertex with the most
    // already-ordered neighbours, ties broken by degree then id.
    std::vector<VertexId> make_order(const VertexMap& seed) const
    {
        std::vector<VertexId> order;
        std::vector<char> placed(n_, 0);
        std::vector<std::size_t> linked(n_, 0);
        auto place = [&](VertexId v) {
            order.push_back(v);
            placed[v] = 1;
            for (const auto& arc : src_.out(v))
                ++linked[arc.other];
            for (const auto& arc : src_.in(v))
                ++linked[arc.other];
        };
        for (VertexId v = 0; v < n_; ++v)
            if (seed.mapped(v))
                place(v);
        while (order.size() < n_) {
            VertexId best = VertexMap::unmapped;
            for (VertexId v = 0; v < n_; ++v) {
                if (placed[v])
                    continue;
                if (best == VertexMap::unmapped || linked[v] > linked[best] ||
                    (linked[v] == linked[best] && src_.degree(v) > src_.degree(best)))
                    best = v;
            }
            place(best);
        }
        return order;
    }

    bool search(std::size_t depth, std::vector<Bits>& dom)
    {
        if (depth == order_.size())
            return true;
        VertexId v = order_[depth];
        std::vector<VertexId> candidates;
        dom[v].for_each([&](std::size_t t) { candidates.push_back(static_cast<VertexId>(t)); });
        for (VertexId t : candidates) {
            std::vector<Bits> next = dom;
            next[v] = Bits(m_);
            next[v].set(t);
            assign_[v] = t;
            if (propagate(v, t, next) && search(depth + 1, next))
                return true;
            assign_[v] = VertexMap::unmapped;
        }
        return false;
    }

    bool propagate(VertexId v, VertexId t, std::vector<Bits>& dom) const
    {
        for (const auto& arc : src_.out(v)) {
            VertexId w = arc.other;
            if (assign_[w] != VertexMap::unmapped) {
                if (!tgt_.has_edge(t, assign_[w], arc.label))
                    return false;
                continue;
            }
            Bits allowed(m_);
            for (const auto& h : tgt_.out(t))
                if (h.label == arc.label)
                    allowed.set(h.other);
            dom[w].and_with(allowed);
            if (dom[w].none())
                return false;
        }
        for (const auto& arc : src_.in(v)) {
            VertexId w = arc.other;
            if (assign_[w] != VertexMap::unmapped) {
                if (!tgt_.has_edge(assign_[w], t, arc.label))
                    return false;
                continue;
            }
            Bits allowed(m_);
            for (const auto& h : tgt_.in(t))
                if (h.label == arc.label)
                    allowed.set(h.other);
            dom[w].and_with(allowed);
            if (dom[w].none())
                return false;
        }
        if (injective_) {
            for (VertexId w = 0; w < n_; ++w) {
                if (assign_[w] != VertexMap::unmapped)
                    continue;
                dom[w].reset(t);
                if (dom[w].none())
                    return false;
            }
        }
        return true;
    }

    const Structure& src_;
    const Structure& tgt_;
    bool injective_;
    std::size_t n_;
    std::size_t m_;
    std::vector<VertexId> order_;
    std::vector<VertexId> assign_;
};

inline VertexMap checked_seed(const Structure& source, const Structure& target, VertexMap seed)
{
    seed.resize(std::max(seed.size(), source.vertex_count()));
    if (seed.size() > source.vertex_count())
        for (VertexId v = static_cast<VertexId>(source.vertex_count()); v < seed.size(); ++v)
            if (seed.mapped(v))
                throw std::invalid_argument("seed maps a vertex outside the source");
    for (VertexId v = 0; v < source.vertex_count(); ++v)
        if (seed.mapped(v) && !target.has_vertex(seed(v)))
            throw std::invalid_argument("seed maps into a non-vertex of the target");
    auto pin = [&](VertexId s, VertexId t) {
        if (seed.mapped(s) && seed(s) != t)
            throw std::invalid_argument("seed does not map constants to constants");
        seed.set(s, t);
    };
    pin(source.a(), target.a());
    pin(source.b(), target.b());
    seed.resize(source.vertex_count());
    return seed;
}

}  // namespace detail

/// Total extension of `seed` that is a homomorphism source -> target, or
/// nullopt. Deterministic: fixed variable order, candidates by ascending id.
inline std::optional<VertexMap> find_homomorphism(const Structure& source, const Structure& target,
                                                  const VertexMap& seed = {})
{
    auto s = detail::checked_seed(source, target, seed);
    return detail::HomSearch(source, target, false).run(s);
}

/// Bijection preserving labeled edges in both directions (with a->a, b->b).
inline std::optional<VertexMap> find_isomorphism(const Structure& x, const Structure& y)
{
    if (x.vertex_count() != y.vertex_count() || x.edge_count() != y.edge_count())
        return std::nullopt;
    auto s = detail::checked_seed(x, y, {});
    // Injective on vertices and edge counts equal: the induced edge map is a
    // bijection, so edges are reflected as well.
    return detail::HomSearch(x, y, true).run(s);
}

inline bool isomorphic(const Structure& x, const Structure& y) { return find_isomorphism(x, y).has_value(); }

/// Isomorphism after erasing the shade of every grid symbol.
inline std::optional<VertexMap> find_isomorphism_mod_shades(const Structure& x, const Structure& y)
{
    return find_isomorphism(x.erase_shades(), y.erase_shades());
}

inline bool isomorphic_mod_shades(const Structure& x, const Structure& y)
{
    return find_isomorphism_mod_shades(x, y).has_value();
}

}  // namespace escape
