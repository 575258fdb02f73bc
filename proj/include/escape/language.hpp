#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "escape/homomorphism.hpp"
#include "escape/structure.hpp"
#include "escape/symbol.hpp"

namespace escape
{

enum class Colorspace : std::uint8_t { Base, Green, Red, Mixed };

struct LanguageError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct Transition
{
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    SymbolPattern pattern;
    std::optional<Color> color;  // absent in Base languages

    friend bool operator==(const Transition&, const Transition&) = default;
};

using Pair = std::pair<VertexId, VertexId>;
using PairSet = std::set<Pair>;

// Finite path language as an acyclic automaton over symbol patterns.
//
// Normal form after every construction: dead states pruned, states
// renumbered topologically (every transition goes from a lower to a higher
// state), start state 0, start never accepting.
class PathLanguage
{
public:
    PathLanguage() = default;

    PathLanguage(AlphabetPtr alphabet, Colorspace cs, std::uint32_t states, std::vector<std::uint32_t> accept,
                 std::vector<Transition> transitions)
        : alphabet_(std::move(alphabet)), colorspace_(cs), states_(states), transitions_(std::move(transitions))
    {
        if (!alphabet_)
            throw LanguageError("language without alphabet");
        accept_.assign(states_, 0);
        for (auto s : accept) {
            if (s >= states_)
                throw LanguageError("accept state out of range");
            accept_[s] = 1;
        }
        for (const auto& t : transitions_) {
            if (t.from >= states_ || t.to >= states_)
                throw LanguageError("transition state out of range");
            if ((cs == Colorspace::Base) != !t.color.has_value())
                throw LanguageError("transition color does not match the colorspace");
            if (cs == Colorspace::Green && t.color != Color::Green)
                throw LanguageError("red transition in a green language");
            if (cs == Colorspace::Red && t.color != Color::Red)
                throw LanguageError("green transition in a red language");
            if (!nonempty(t.pattern))
                throw LanguageError("pattern denotes no symbol of the alphabet");
        }
        normalize();
    }

    const AlphabetPtr& alphabet() const { return alphabet_; }
    Colorspace colorspace() const { return colorspace_; }
    bool colored() const { return colorspace_ != Colorspace::Base; }
    std::uint32_t state_count() const { return states_; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    bool accepting(std::uint32_t s) const { return accept_.at(s) != 0; }
    bool empty() const { return transitions_.empty(); }

    std::vector<std::uint32_t> accept_states() const
    {
        std::vector<std::uint32_t> out;
        for (std::uint32_t s = 0; s < states_; ++s)
            if (accept_[s])
                out.push_back(s);
        return out;
    }

    std::size_t max_length() const
    {
        std::vector<int> len(states_, -1);
        len[0] = 0;
        std::size_t best = 0;
        for (const auto& t : transitions_)  // sorted by source state
            if (len[t.from] >= 0)
                len[t.to] = std::max(len[t.to], len[t.from] + 1);
        for (std::uint32_t s = 0; s < states_; ++s)
            if (accept_[s] && len[s] > 0)
                best = std::max(best, static_cast<std::size_t>(len[s]));
        return best;
    }

    /// Number of token positions: symbols for Base, colored labels otherwise.
    std::size_t token_count() const { return colored() ? alphabet_->label_count() : alphabet_->size(); }

    bool matches(const Transition& t, std::size_t token) const
    {
        if (colored()) {
            auto l = alphabet_->label(token);
            return t.color == l.color && t.pattern.matches(l.symbol);
        }
        return t.pattern.matches(alphabet_->symbol(token));
    }

    bool accepts(const Word& w) const
    {
        if (colored())
            throw LanguageError("uncolored word against a colored language");
        std::vector<std::size_t> tokens;
        for (const auto& s : w)
            tokens.push_back(alphabet_->index(s));
        return accepts_tokens(tokens);
    }

    bool accepts(const ColoredWord& w) const
    {
        if (!colored())
            throw LanguageError("colored word against a base language");
        std::vector<std::size_t> tokens;
        for (const auto& l : w)
            tokens.push_back(alphabet_->index(l));
        return accepts_tokens(tokens);
    }

    bool accepts_tokens(const std::vector<std::size_t>& tokens) const
    {
        if (tokens.empty())
            return false;
        std::vector<char> cur(states_, 0);
        cur[0] = 1;
        for (auto tok : tokens) {
            std::vector<char> next(states_, 0);
            bool any = false;
            for (const auto& t : transitions_)
                if (cur[t.from] && matches(t, tok))
                    next[t.to] = 1, any = true;
            if (!any)
                return false;
            cur.swap(next);
        }
        for (std::uint32_t s = 0; s < states_; ++s)
            if (cur[s] && accept_[s])
                return true;
        return false;
    }

    /// Exact number of distinct words (saturating at uint64 max), counted on
    /// the subset construction layer by layer.
    std::uint64_t word_count() const
    {
        using Subset = std::vector<char>;
        constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
        auto add = [&](std::uint64_t x, std::uint64_t y) { return x > cap - y ? cap : x + y; };
        std::map<Subset, std::uint64_t> layer;
        Subset init(states_, 0);
        init[0] = 1;
        layer[init] = 1;
        std::uint64_t total = 0;
        while (!layer.empty()) {
            std::map<Subset, std::uint64_t> next;
            for (const auto& [set, n] : layer) {
                for (std::size_t tok = 0; tok < token_count(); ++tok) {
                    Subset s(states_, 0);
                    bool any = false;
                    for (const auto& t : transitions_)
                        if (set[t.from] && matches(t, tok))
                            s[t.to] = 1, any = true;
                    if (!any)
                        continue;
                    auto& slot = next[s];
                    slot = add(slot, n);
                }
            }
            for (const auto& [set, n] : next)
                for (std::uint32_t q = 0; q < states_; ++q)
                    if (set[q] && accept_[q]) {
                        total = add(total, n);
                        break;
                    }
            layer.swap(next);
        }
        return total;
    }

    friend bool operator==(const PathLanguage& x, const PathLanguage& y)
    {
        return *x.alphabet_ == *y.alphabet_ && x.colorspace_ == y.colorspace_ && x.states_ == y.states_ &&
               x.accept_ == y.accept_ && x.transitions_ == y.transitions_;
    }

private:
    bool nonempty(const SymbolPattern& p) const
    {
        for (std::size_t i = 0; i < alphabet_->size(); ++i)
            if (p.matches(alphabet_->symbol(i)))
                return true;
        return false;
    }

    void normalize()
    {
        // reachability from start and co-reachability to accept
        std::vector<std::vector<std::uint32_t>> fwd(states_), bwd(states_);
        for (const auto& t : transitions_) {
            fwd[t.from].push_back(t.to);
            bwd[t.to].push_back(t.from);
        }
        auto sweep = [&](std::vector<std::uint32_t> roots, const std::vector<std::vector<std::uint32_t>>& g) {
            std::vector<char> seen(states_, 0);
            for (auto r : roots)
                seen[r] = 1;
            while (!roots.empty()) {
                auto s = roots.back();
                roots.pop_back();
                for (auto n : g[s])
                    if (!seen[n])
                        seen[n] = 1, roots.push_back(n);
            }
            return seen;
        };
        if (states_ == 0)
            throw LanguageError("automaton without states");
        auto live_f = sweep({0}, fwd);
        auto live_b = sweep(accept_states(), bwd);
        if (accept_[0])
            throw LanguageError("language contains the empty word");

        // topological order of live states (Kahn), start first
        std::vector<std::uint32_t> indeg(states_, 0);
        std::vector<Transition> live;
        for (const auto& t : transitions_)
            if (live_f[t.from] && live_b[t.from] && live_f[t.to] && live_b[t.to]) {
                live.push_back(t);
                ++indeg[t.to];
            }
        std::vector<std::uint32_t> rank(states_, std::numeric_limits<std::uint32_t>::max());
        std::vector<std::uint32_t> queue;
        std::uint32_t next = 0;
        if (live_b[0])
            queue.push_back(0);
        else {
            // empty language: a single dead start state
            states_ = 1;
            accept_.assign(1, 0);
            transitions_.clear();
            return;
        }
        std::vector<std::vector<std::uint32_t>> succ(states_);
        for (const auto& t : live)
            succ[t.from].push_back(t.to);
        for (std::size_t i = 0; i < queue.size(); ++i) {
            auto s = queue[i];
            rank[s] = next++;
            for (auto n : succ[s])
                if (--indeg[n] == 0)
                    queue.push_back(n);
        }
        std::size_t live_states = 0;
        for (std::uint32_t s = 0; s < states_; ++s)
            if (live_f[s] && live_b[s])
                ++live_states;
        if (next != live_states)
            throw LanguageError("automaton has a cycle: language is not finite");

        std::vector<char> acc(next, 0);
        for (std::uint32_t s = 0; s < states_; ++s)
            if (rank[s] != std::numeric_limits<std::uint32_t>::max() && accept_[s])
                acc[rank[s]] = 1;
        for (auto& t : live) {
            t.from = rank[t.from];
            t.to = rank[t.to];
        }
        std::sort(live.begin(), live.end(), [](const Transition& x, const Transition& y) {
            return std::tie(x.from, x.to) < std::tie(y.from, y.to);
        });
        live.erase(std::unique(live.begin(), live.end()), live.end());
        states_ = next;
        accept_ = std::move(acc);
        transitions_ = std::move(live);
    }

    AlphabetPtr alphabet_;
    Colorspace colorspace_ = Colorspace::Base;
    std::uint32_t states_ = 1;
    std::vector<char> accept_{0};
    std::vector<Transition> transitions_;
};

// --- constructors ----------------------------------------------------------

inline PathLanguage from_pattern(AlphabetPtr alphabet, const SymbolPattern& p)
{
    return PathLanguage(std::move(alphabet), Colorspace::Base, 2, {1}, {Transition{0, 1, p, std::nullopt}});
}

inline PathLanguage from_symbol(AlphabetPtr alphabet, const Symbol& s)
{
    return from_pattern(std::move(alphabet), SymbolPattern::exact(s));
}

/// Single-word language; the word may be base (Word) or colored.
inline PathLanguage from_word(AlphabetPtr alphabet, const Word& w)
{
    if (w.empty())
        throw LanguageError("empty word");
    std::vector<Transition> ts;
    for (std::uint32_t i = 0; i < w.size(); ++i)
        ts.push_back({i, i + 1, SymbolPattern::exact(w[i]), std::nullopt});
    return PathLanguage(std::move(alphabet), Colorspace::Base, static_cast<std::uint32_t>(w.size() + 1),
                        {static_cast<std::uint32_t>(w.size())}, std::move(ts));
}

/// Sigma^{1..n}: all nonempty words of length at most n.
inline PathLanguage sigma_upto(AlphabetPtr alphabet, std::size_t n)
{
    if (n < 1)
        throw LanguageError("sigma_upto needs n >= 1");
    std::vector<Transition> ts;
    std::vector<std::uint32_t> acc;
    for (std::uint32_t i = 0; i < n; ++i) {
        ts.push_back({i, i + 1, SymbolPattern::any(), std::nullopt});
        acc.push_back(i + 1);
    }
    return PathLanguage(std::move(alphabet), Colorspace::Base, static_cast<std::uint32_t>(n + 1), std::move(acc),
                        std::move(ts));
}

namespace detail
{

inline void require_compatible(const PathLanguage& x, const PathLanguage& y)
{
    if (!(*x.alphabet() == *y.alphabet()))
        throw LanguageError("languages over different shade sets");
    if (x.colorspace() != y.colorspace())
        throw LanguageError("languages in different colorspaces; recolor first");
}

}  // namespace detail

inline PathLanguage concat(const PathLanguage& x, const PathLanguage& y)
{
    detail::require_compatible(x, y);
    const auto nx = x.state_count();
    auto map_y = [&](std::uint32_t s) { return nx + s - 1; };
    std::vector<Transition> ts = x.transitions();
    auto x_acc = x.accept_states();
    for (const auto& t : y.transitions()) {
        if (t.from == 0) {
            for (auto f : x_acc)
                ts.push_back({f, map_y(t.to), t.pattern, t.color});
        } else {
            ts.push_back({map_y(t.from), map_y(t.to), t.pattern, t.color});
        }
    }
    std::vector<std::uint32_t> acc;
    for (auto f : y.accept_states())
        acc.push_back(map_y(f));
    return PathLanguage(x.alphabet(), x.colorspace(), nx + y.state_count() - 1, std::move(acc), std::move(ts));
}

inline PathLanguage concat(std::initializer_list<PathLanguage> parts)
{
    if (parts.size() == 0)
        throw LanguageError("empty concatenation");
    auto it = parts.begin();
    PathLanguage out = *it++;
    for (; it != parts.end(); ++it)
        out = concat(out, *it);
    return out;
}

inline PathLanguage unite(const PathLanguage& x, const PathLanguage& y)
{
    detail::require_compatible(x, y);
    const auto nx = x.state_count();
    auto map_y = [&](std::uint32_t s) { return s == 0 ? 0u : nx + s - 1; };
    std::vector<Transition> ts = x.transitions();
    for (const auto& t : y.transitions())
        ts.push_back({map_y(t.from), map_y(t.to), t.pattern, t.color});
    std::vector<std::uint32_t> acc = x.accept_states();
    for (auto f : y.accept_states())
        acc.push_back(map_y(f));
    return PathLanguage(x.alphabet(), x.colorspace(), nx + y.state_count() - 1, std::move(acc), std::move(ts));
}

inline PathLanguage unite(std::initializer_list<PathLanguage> parts)
{
    if (parts.size() == 0)
        throw LanguageError("empty union");
    auto it = parts.begin();
    PathLanguage out = *it++;
    for (; it != parts.end(); ++it)
        out = unite(out, *it);
    return out;
}

/// x (mid + eps) y, built as x y + x mid y.
inline PathLanguage concat_optional(const PathLanguage& x, const PathLanguage& mid, const PathLanguage& y)
{
    return unite(concat(x, y), concat({x, mid, y}));
}

/// G(l) or R(l).
inline PathLanguage color(const PathLanguage& l, Color c)
{
    if (l.colored())
        throw LanguageError("language is already colored");
    std::vector<Transition> ts = l.transitions();
    for (auto& t : ts)
        t.color = c;
    return PathLanguage(l.alphabet(), c == Color::Green ? Colorspace::Green : Colorspace::Red, l.state_count(),
                        l.accept_states(), std::move(ts));
}

/// Union of two differently colored languages (e.g. a mixed-color probe).
inline PathLanguage unite_mixed(const PathLanguage& x, const PathLanguage& y)
{
    if (!x.colored() || !y.colored())
        throw LanguageError("mixed union needs colored operands");
    auto relabel = [](const PathLanguage& l) {
        return PathLanguage(l.alphabet(), Colorspace::Mixed, l.state_count(), l.accept_states(), l.transitions());
    };
    return unite(relabel(x), relabel(y));
}

// --- evaluation --------------------------------------------------------------

namespace detail
{

// Per state, the outgoing transitions as token masks over colored labels.
struct CompiledLanguage
{
    struct Out
    {
        std::uint32_t to;
        std::vector<char> mask;
    };
    std::vector<std::vector<Out>> out;
    std::vector<char> accept;
    std::uint32_t states = 0;

    explicit CompiledLanguage(const PathLanguage& l)
    {
        if (!l.colored())
            throw LanguageError("only colored languages can be evaluated on structures");
        states = l.state_count();
        out.resize(states);
        accept.resize(states);
        for (std::uint32_t s = 0; s < states; ++s)
            accept[s] = l.accepting(s);
        const auto n = l.token_count();
        for (const auto& t : l.transitions()) {
            std::vector<char> mask(n, 0);
            for (std::size_t tok = 0; tok < n; ++tok)
                mask[tok] = l.matches(t, tok);
            out[t.from].push_back({t.to, std::move(mask)});
        }
    }
};

}  // namespace detail

/// Every (u, v) such that some word of l labels a directed path u -> v in d,
/// restricted to u in `sources` when given. Product of the automaton with d,
/// propagating source bitsets through automaton states in topological order.
inline PairSet eval(const PathLanguage& l, const Structure& d, const std::vector<VertexId>* sources = nullptr)
{
    detail::CompiledLanguage c(l);
    const Alphabet& alpha = *l.alphabet();
    const std::size_t n = d.vertex_count();
    std::vector<std::vector<detail::Bits>> reach(c.states);
    for (auto& r : reach)
        r.assign(n, detail::Bits());
    auto touch = [&](std::uint32_t q, VertexId v) -> detail::Bits& {
        if (!reach[q][v].allocated())
            reach[q][v] = detail::Bits(n);
        return reach[q][v];
    };
    if (sources) {
        for (auto u : *sources)
            if (d.has_vertex(u))
                touch(0, u).set(u);
    } else {
        for (VertexId u = 0; u < n; ++u)
            touch(0, u).set(u);
    }
    for (std::uint32_t q = 0; q < c.states; ++q) {
        if (c.out[q].empty())
            continue;
        for (VertexId v = 0; v < n; ++v) {
            const auto& here = reach[q][v];
            if (!here.allocated() || here.none())
                continue;
            for (const auto& arc : d.out(v)) {
                auto tok = alpha.index(arc.label);
                for (const auto& o : c.out[q])
                    if (o.mask[tok])
                        touch(o.to, arc.other).or_with(here);
            }
        }
    }
    PairSet out;
    for (std::uint32_t q = 0; q < c.states; ++q) {
        if (!c.accept[q])
            continue;
        for (VertexId v = 0; v < n; ++v) {
            const auto& here = reach[q][v];
            if (!here.allocated())
                continue;
            here.for_each([&](std::size_t u) { out.insert({static_cast<VertexId>(u), v}); });
        }
    }
    return out;
}

inline bool holds(const PathLanguage& l, const Structure& d, VertexId u, VertexId v)
{
    std::vector<VertexId> src{u};
    return eval(l, d, &src).count({u, v}) != 0;
}

/// Shortest colored path u -> v in d labeled by a word of l, as the list of
/// visited vertices and the word; ties broken by smallest vertex id and
/// label order. Nullopt if none.
struct Witness
{
    std::vector<VertexId> vertices;  // u, s_1, ..., v
    ColoredWord word;
};

inline std::optional<Witness> find_path(const PathLanguage& l, const Structure& d, VertexId u, VertexId v)
{
    detail::CompiledLanguage c(l);
    const Alphabet& alpha = *l.alphabet();
    struct Node
    {
        VertexId vertex;
        std::uint32_t state;
        std::int64_t parent;
        EdgeLabel via;
    };
    std::vector<Node> nodes{{u, 0, -1, {}}};
    std::set<std::pair<VertexId, std::uint32_t>> seen{{u, 0}};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto cur = nodes[i];
        if (cur.vertex == v && c.accept[cur.state]) {
            Witness w;
            for (std::int64_t k = static_cast<std::int64_t>(i); k >= 0; k = nodes[k].parent) {
                w.vertices.push_back(nodes[k].vertex);
                if (nodes[k].parent >= 0)
                    w.word.push_back(nodes[k].via);
            }
            std::reverse(w.vertices.begin(), w.vertices.end());
            std::reverse(w.word.begin(), w.word.end());
            return w;
        }
        std::vector<Arc> arcs(d.out(cur.vertex).begin(), d.out(cur.vertex).end());
        std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) {
            return std::tie(x.other, x.label) < std::tie(y.other, y.label);
        });
        for (const auto& arc : arcs) {
            auto tok = alpha.index(arc.label);
            for (const auto& o : c.out[cur.state])
                if (o.mask[tok] && seen.insert({arc.other, o.to}).second)
                    nodes.push_back({arc.other, o.to, static_cast<std::int64_t>(i), arc.label});
        }
    }
    return std::nullopt;
}

// --- enumeration -------------------------------------------------------------

namespace detail
{

inline std::vector<std::vector<std::size_t>> enumerate_tokens(const PathLanguage& l, std::size_t budget,
                                                              bool& truncated)
{
    const auto maxlen = l.max_length();
    if (maxlen >= 64)
        throw LanguageError("word length beyond enumeration support");
    const auto states = l.state_count();
    // remaining[q]: bit r set iff an accepting state is reachable in exactly r steps
    std::vector<std::uint64_t> remaining(states, 0);
    for (std::uint32_t q = states; q-- > 0;) {
        if (l.accepting(q))
            remaining[q] |= 1;
        for (const auto& t : l.transitions())
            if (t.from == q)
                remaining[q] |= remaining[t.to] << 1;
    }
    const auto ntok = l.token_count();
    std::vector<std::vector<std::uint32_t>> step(states * ntok);
    for (const auto& t : l.transitions())
        for (std::size_t tok = 0; tok < ntok; ++tok)
            if (l.matches(t, tok))
                step[t.from * ntok + tok].push_back(t.to);

    std::vector<std::vector<std::size_t>> out;
    truncated = false;
    std::vector<std::size_t> prefix;
    auto dfs = [&](auto&& self, const std::vector<char>& set, std::size_t left) -> bool {
        if (left == 0) {
            for (std::uint32_t q = 0; q < states; ++q)
                if (set[q] && l.accepting(q)) {
                    if (out.size() == budget) {
                        truncated = true;
                        return false;
                    }
                    out.push_back(prefix);
                    return true;
                }
            return true;
        }
        for (std::size_t tok = 0; tok < ntok; ++tok) {
            std::vector<char> next(states, 0);
            std::uint64_t feasible = 0;
            bool any = false;
            for (std::uint32_t q = 0; q < states; ++q) {
                if (!set[q])
                    continue;
                for (auto to : step[q * ntok + tok]) {
                    if (!next[to])
                        feasible |= remaining[to];
                    next[to] = 1;
                    any = true;
                }
            }
            if (!any || !((feasible >> (left - 1)) & 1))
                continue;
            prefix.push_back(tok);
            bool go_on = self(self, next, left - 1);
            prefix.pop_back();
            if (!go_on)
                return false;
        }
        return true;
    };
    std::vector<char> init(states, 0);
    init[0] = 1;
    for (std::size_t len = 1; len <= maxlen; ++len)
        if (!dfs(dfs, init, len))
            break;
    return out;
}

}  // namespace detail

template <class W>
struct WordList
{
    std::vector<W> words;
    bool truncated = false;
};

/// Words of a base language in shortlex order, at most `budget` of them.
inline WordList<Word> enumerate_words(const PathLanguage& l, std::size_t budget)
{
    if (budget < 1)
        throw LanguageError("enumeration budget must be positive");
    if (l.colored())
        throw LanguageError("enumerate_words expects a base language; use enumerate_colored_words");
    WordList<Word> out;
    for (const auto& toks : detail::enumerate_tokens(l, budget, out.truncated)) {
        Word w;
        for (auto t : toks)
            w.push_back(l.alphabet()->symbol(t));
        out.words.push_back(std::move(w));
    }
    return out;
}

inline WordList<ColoredWord> enumerate_colored_words(const PathLanguage& l, std::size_t budget)
{
    if (budget < 1)
        throw LanguageError("enumeration budget must be positive");
    if (!l.colored())
        throw LanguageError("enumerate_colored_words expects a colored language");
    WordList<ColoredWord> out;
    for (const auto& toks : detail::enumerate_tokens(l, budget, out.truncated)) {
        ColoredWord w;
        for (auto t : toks)
            w.push_back(l.alphabet()->label(t));
        out.words.push_back(std::move(w));
    }
    return out;
}

}  // namespace escape
