#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace escape
{

enum class Kind : std::uint8_t { Alpha, X, Y, Dollar, Omega, Grid };
enum class Temp : std::uint8_t { Cold, Warm };
enum class Letter : std::uint8_t { A, B };
enum class Orient : std::uint8_t { H, V };
enum class Color : std::uint8_t { Green, Red };

inline Color opposite(Color c) { return c == Color::Green ? Color::Red : Color::Green; }
inline Temp opposite(Temp t) { return t == Temp::Cold ? Temp::Warm : Temp::Cold; }

struct ParseError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// One letter of the reduction alphabet. Non-grid kinds ignore letter,
/// orient and shade; Omega also ignores temp.
struct Symbol
{
    Kind kind = Kind::Omega;
    Temp temp = Temp::Cold;
    Letter letter = Letter::A;
    Orient orient = Orient::H;
    std::uint8_t shade = 0;

    static Symbol make(Kind k, Temp t) { return Symbol{k, t, Letter::A, Orient::H, 0}; }
    static Symbol omega() { return Symbol{}; }
    static Symbol grid(Letter l, Orient o, Temp t, std::uint8_t s) { return Symbol{Kind::Grid, t, l, o, s}; }

    bool has_temp() const { return kind != Kind::Omega; }
    bool is_grid() const { return kind == Kind::Grid; }
    bool warm() const { return has_temp() && temp == Temp::Warm; }
    bool cold() const { return has_temp() && temp == Temp::Cold; }

    /// Key in the fixed symbol order: kind, then letter, orientation,
    /// temperature (Cold first), shade.
    std::uint32_t order_key() const
    {
        if (kind == Kind::Omega)
            return 8;
        if (kind != Kind::Grid)
            return static_cast<std::uint32_t>(kind) * 2 + static_cast<std::uint32_t>(temp);
        return 9u + ((static_cast<std::uint32_t>(letter) * 2 + static_cast<std::uint32_t>(orient)) * 2 +
                     static_cast<std::uint32_t>(temp)) * 256u + shade;
    }

    friend bool operator==(const Symbol& x, const Symbol& y) { return x.order_key() == y.order_key(); }
    friend bool operator<(const Symbol& x, const Symbol& y) { return x.order_key() < y.order_key(); }
    friend bool operator!=(const Symbol& x, const Symbol& y) { return !(x == y); }
};

/// A colored symbol: the edge alphabet of red-green structures.
struct EdgeLabel
{
    Symbol symbol;
    Color color = Color::Green;

    friend bool operator==(const EdgeLabel& x, const EdgeLabel& y)
    {
        return x.symbol == y.symbol && x.color == y.color;
    }
    friend bool operator!=(const EdgeLabel& x, const EdgeLabel& y) { return !(x == y); }
    friend bool operator<(const EdgeLabel& x, const EdgeLabel& y)
    {
        if (x.symbol != y.symbol)
            return x.symbol < y.symbol;
        return x.color < y.color;
    }
};

using Word = std::vector<Symbol>;
using ColoredWord = std::vector<EdgeLabel>;

inline ColoredWord paint(const Word& w, Color c)
{
    ColoredWord out;
    out.reserve(w.size());
    for (const auto& s : w)
        out.push_back({s, c});
    return out;
}

inline Word strip(const ColoredWord& w)
{
    Word out;
    out.reserve(w.size());
    for (const auto& l : w)
        out.push_back(l.symbol);
    return out;
}

/// The alphabet Sigma for a given shade set: 9 plain symbols plus
/// {A,B} x {H,V} x {W,C} x shades.
class Alphabet
{
public:
    explicit Alphabet(std::vector<std::string> shades) : shades_(std::move(shades))
    {
        std::sort(shades_.begin(), shades_.end());
        shades_.erase(std::unique(shades_.begin(), shades_.end()), shades_.end());
        if (shades_.empty() || shades_.size() > 64)
            throw std::invalid_argument("shade set must have between 1 and 64 members");
    }

    const std::vector<std::string>& shades() const { return shades_; }
    std::size_t shade_count() const { return shades_.size(); }
    std::size_t size() const { return 9 + 8 * shades_.size(); }
    std::size_t label_count() const { return 2 * size(); }

    std::optional<std::uint8_t> shade_index(std::string_view name) const
    {
        auto it = std::lower_bound(shades_.begin(), shades_.end(), name);
        if (it == shades_.end() || *it != name)
            return std::nullopt;
        return static_cast<std::uint8_t>(it - shades_.begin());
    }

    std::uint8_t require_shade(std::string_view name) const
    {
        auto s = shade_index(name);
        if (!s)
            throw ParseError("unknown shade '" + std::string(name) + "'");
        return *s;
    }

    const std::string& shade_name(std::uint8_t s) const { return shades_.at(s); }

    /// Dense index in [0, size()), consistent with the symbol order.
    std::size_t index(const Symbol& s) const
    {
        if (s.kind == Kind::Omega)
            return 8;
        if (s.kind != Kind::Grid)
            return static_cast<std::size_t>(s.kind) * 2 + static_cast<std::size_t>(s.temp);
        return 9 + ((static_cast<std::size_t>(s.letter) * 2 + static_cast<std::size_t>(s.orient)) * 2 +
                    static_cast<std::size_t>(s.temp)) * shades_.size() + s.shade;
    }

    std::size_t index(const EdgeLabel& l) const { return index(l.symbol) * 2 + static_cast<std::size_t>(l.color); }

    Symbol symbol(std::size_t i) const
    {
        if (i < 8)
            return Symbol::make(static_cast<Kind>(i / 2), static_cast<Temp>(i % 2));
        if (i == 8)
            return Symbol::omega();
        i -= 9;
        auto shade = static_cast<std::uint8_t>(i % shades_.size());
        i /= shades_.size();
        auto temp = static_cast<Temp>(i % 2);
        i /= 2;
        auto orient = static_cast<Orient>(i % 2);
        auto letter = static_cast<Letter>(i / 2);
        return Symbol::grid(letter, orient, temp, shade);
    }

    EdgeLabel label(std::size_t i) const { return {symbol(i / 2), static_cast<Color>(i % 2)}; }

    std::vector<Symbol> symbols() const
    {
        std::vector<Symbol> out;
        for (std::size_t i = 0; i < size(); ++i)
            out.push_back(symbol(i));
        return out;
    }

    friend bool operator==(const Alphabet& x, const Alphabet& y) { return x.shades_ == y.shades_; }

    // Text form: alpha^C, x^W, y^C, $^W, omega, A_H^C:gray. Colored labels
    // prefix "G:" or "R:".
    std::string text(const Symbol& s) const
    {
        static constexpr const char* tc[] = {"^C", "^W"};
        switch (s.kind) {
        case Kind::Alpha: return std::string("alpha") + tc[int(s.temp)];
        case Kind::X: return std::string("x") + tc[int(s.temp)];
        case Kind::Y: return std::string("y") + tc[int(s.temp)];
        case Kind::Dollar: return std::string("$") + tc[int(s.temp)];
        case Kind::Omega: return "omega";
        case Kind::Grid: break;
        }
        std::string out;
        out += s.letter == Letter::A ? 'A' : 'B';
        out += s.orient == Orient::H ? "_H" : "_V";
        out += tc[int(s.temp)];
        out += ':';
        out += shade_name(s.shade);
        return out;
    }

    std::string text(const EdgeLabel& l) const
    {
        return std::string(l.color == Color::Green ? "G:" : "R:") + text(l.symbol);
    }

    std::string text(const Word& w) const { return join(w); }
    std::string text(const ColoredWord& w) const { return join(w); }

    Symbol parse_symbol(std::string_view t) const
    {
        if (t == "omega")
            return Symbol::omega();
        auto temp_of = [&](std::string_view suffix) {
            if (suffix == "^C")
                return Temp::Cold;
            if (suffix == "^W")
                return Temp::Warm;
            throw ParseError("bad temperature in '" + std::string(t) + "'");
        };
        auto plain = [&](std::string_view head, Kind k) -> std::optional<Symbol> {
            if (t.size() == head.size() + 2 && t.substr(0, head.size()) == head)
                return Symbol::make(k, temp_of(t.substr(head.size())));
            return std::nullopt;
        };
        if (auto s = plain("alpha", Kind::Alpha))
            return *s;
        if (auto s = plain("x", Kind::X))
            return *s;
        if (auto s = plain("y", Kind::Y))
            return *s;
        if (auto s = plain("$", Kind::Dollar))
            return *s;
        if (t.size() > 6 && (t[0] == 'A' || t[0] == 'B') && t[1] == '_' && (t[2] == 'H' || t[2] == 'V') &&
            t[5] == ':') {
            return Symbol::grid(t[0] == 'A' ? Letter::A : Letter::B, t[2] == 'H' ? Orient::H : Orient::V,
                                temp_of(t.substr(3, 2)), require_shade(t.substr(6)));
        }
        throw ParseError("unrecognized symbol '" + std::string(t) + "'");
    }

    EdgeLabel parse_label(std::string_view t) const
    {
        if (t.size() < 3 || t[1] != ':' || (t[0] != 'G' && t[0] != 'R'))
            throw ParseError("colored label must start with G: or R: ('" + std::string(t) + "')");
        return {parse_symbol(t.substr(2)), t[0] == 'G' ? Color::Green : Color::Red};
    }

    ColoredWord parse_colored_word(std::string_view t) const
    {
        ColoredWord out;
        for (auto tok : split(t))
            out.push_back(parse_label(tok));
        return out;
    }

    Word parse_word(std::string_view t) const
    {
        Word out;
        for (auto tok : split(t))
            out.push_back(parse_symbol(tok));
        return out;
    }

private:
    template <class W>
    std::string join(const W& w) const
    {
        std::string out;
        for (const auto& s : w) {
            if (!out.empty())
                out += ' ';
            out += text(s);
        }
        return out;
    }

    static std::vector<std::string_view> split(std::string_view t)
    {
        std::vector<std::string_view> out;
        std::size_t i = 0;
        while (i < t.size()) {
            while (i < t.size() && t[i] == ' ')
                ++i;
            std::size_t j = i;
            while (j < t.size() && t[j] != ' ')
                ++j;
            if (j > i)
                out.push_back(t.substr(i, j - i));
            i = j;
        }
        return out;
    }

    std::vector<std::string> shades_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

/// A set of symbols given by fixing some components and leaving the
/// rest as wildcards.
struct SymbolPattern
{
    std::optional<Kind> kind;
    std::optional<Temp> temp;
    std::optional<Letter> letter;
    std::optional<Orient> orient;
    std::optional<std::uint8_t> shade;

    static SymbolPattern any() { return {}; }
    static SymbolPattern exact(const Symbol& s)
    {
        SymbolPattern p;
        p.kind = s.kind;
        if (s.has_temp())
            p.temp = s.temp;
        if (s.is_grid()) {
            p.letter = s.letter;
            p.orient = s.orient;
            p.shade = s.shade;
        }
        return p;
    }
    static SymbolPattern plain(Kind k, Temp t) { return exact(Symbol::make(k, t)); }
    static SymbolPattern omega() { return exact(Symbol::omega()); }
    static SymbolPattern grid(std::optional<Letter> l, std::optional<Orient> o, std::optional<Temp> t,
                              std::optional<std::uint8_t> s = std::nullopt)
    {
        SymbolPattern p;
        p.kind = Kind::Grid;
        p.letter = l;
        p.orient = o;
        p.temp = t;
        p.shade = s;
        return p;
    }

    bool matches(const Symbol& s) const
    {
        if (kind && *kind != s.kind)
            return false;
        if (temp && (!s.has_temp() || *temp != s.temp))
            return false;
        if (letter && (!s.is_grid() || *letter != s.letter))
            return false;
        if (orient && (!s.is_grid() || *orient != s.orient))
            return false;
        if (shade && (!s.is_grid() || *shade != s.shade))
            return false;
        return true;
    }

    friend bool operator==(const SymbolPattern&, const SymbolPattern&) = default;
};

}  // namespace escape
