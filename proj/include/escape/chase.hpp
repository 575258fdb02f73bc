#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "escape/language.hpp"
#include "escape/structure.hpp"

namespace escape
{

enum class Direction : std::uint8_t { GreenToRed, RedToGreen };

/// L-> (green body, red head) or L<- (red body, green head).
class RegularConstraint
{
public:
    RegularConstraint(PathLanguage base, Direction dir, std::string name = {})
        : base_(std::move(base)), dir_(dir), name_(std::move(name)),
          body_(color(base_, dir == Direction::GreenToRed ? Color::Green : Color::Red)),
          head_(color(base_, dir == Direction::GreenToRed ? Color::Red : Color::Green))
    {
    }

    const PathLanguage& base() const { return base_; }
    Direction direction() const { return dir_; }
    const std::string& name() const { return name_; }
    const PathLanguage& body() const { return body_; }
    const PathLanguage& head() const { return head_; }
    Color head_color() const { return dir_ == Direction::GreenToRed ? Color::Red : Color::Green; }

private:
    PathLanguage base_;
    Direction dir_;
    std::string name_;
    PathLanguage body_;
    PathLanguage head_;
};

using ConstraintSet = std::vector<RegularConstraint>;

/// L<-> for every L, in order: constraint 2i is L_i->, 2i+1 is L_i<-.
inline ConstraintSet both_directions(const std::vector<PathLanguage>& langs, const std::vector<std::string>& names = {})
{
    ConstraintSet out;
    for (std::size_t i = 0; i < langs.size(); ++i) {
        auto n = i < names.size() ? names[i] : "L" + std::to_string(i);
        out.emplace_back(langs[i], Direction::GreenToRed, n);
        out.emplace_back(langs[i], Direction::RedToGreen, n);
    }
    return out;
}

struct Request
{
    VertexId u = 0;
    VertexId v = 0;
    std::size_t constraint = 0;  // index into the constraint set

    friend bool operator==(const Request&, const Request&) = default;
    friend bool operator<(const Request& x, const Request& y)
    {
        return std::tie(x.constraint, x.u, x.v) < std::tie(y.constraint, y.u, y.v);
    }
};

struct StaleRequest : std::logic_error
{
    using std::logic_error::logic_error;
};

struct IllegalWord : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

/// Requests of one constraint, sorted by (u, v).
inline std::vector<Request> requests_of(const RegularConstraint& t, std::size_t index, const Structure& d)
{
    auto body = eval(t.body(), d);
    if (body.empty())
        return {};
    std::vector<VertexId> sources;
    for (const auto& [u, v] : body)
        if (sources.empty() || sources.back() != u)
            sources.push_back(u);
    auto head = eval(t.head(), d, &sources);
    std::vector<Request> out;
    for (const auto& p : body)
        if (!head.count(p))
            out.push_back({p.first, p.second, index});
    return out;
}

/// All triples (u, v, t) with d |= body(t)(u,v) and d |/= head(t)(u,v),
/// sorted by (constraint index, u, v).
inline std::vector<Request> requests(const ConstraintSet& constraints, const Structure& d)
{
    std::vector<Request> out;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        auto r = requests_of(constraints[i], i, d);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

inline bool satisfies(const Structure& d, const ConstraintSet& constraints)
{
    for (std::size_t i = 0; i < constraints.size(); ++i)
        if (!requests_of(constraints[i], i, d).empty())
            return false;
    return true;
}

/// Serves r in place: appends word[u, v] with fresh intermediate vertices.
/// Rejects words outside the head, non-requests and stale requests.
inline std::vector<VertexId> add_in_place(Structure& d, const ConstraintSet& constraints, const Request& r,
                                          const ColoredWord& word, std::span<const std::string> names = {})
{
    const auto& t = constraints.at(r.constraint);
    if (word.empty() || !t.head().accepts(word))
        throw IllegalWord("word is not in the head language of " + t.name());
    if (!d.has_vertex(r.u) || !d.has_vertex(r.v))
        throw std::out_of_range("request endpoint is not a vertex");
    if (holds(t.head(), d, r.u, r.v))
        throw StaleRequest("head already holds for this pair");
    if (!holds(t.body(), d, r.u, r.v))
        throw std::invalid_argument("body does not hold for this pair: not a request");
    return d.append_path(word, r.u, r.v, names);
}

inline Structure add(const Structure& d, const ConstraintSet& constraints, const Request& r, const ColoredWord& word)
{
    Structure out = d;
    add_in_place(out, constraints, r, word);
    return out;
}

enum class Clause : std::uint8_t { None, UnservedRequest, GreenQueryMissing, RedQueryPresent };

struct Verdict
{
    bool valid = false;
    Clause clause = Clause::None;
    std::string reason;
    std::optional<Request> request;  // for UnservedRequest
    std::optional<Pair> pair;        // for the query clauses

    explicit operator bool() const { return valid; }
};

/// m is a counterexample iff m |= Q<->, (a,b) in G(q0)(m) and (a,b) not in
/// R(q0)(m). Reports the first failing clause with a witness.
inline Verdict validate_counterexample(const Structure& m, const ConstraintSet& constraints, const PathLanguage& q0)
{
    Verdict v;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        auto r = requests_of(constraints[i], i, m);
        if (!r.empty()) {
            v.clause = Clause::UnservedRequest;
            v.request = r.front();
            v.reason = "unserved request of " + constraints[i].name() +
                       (constraints[i].direction() == Direction::GreenToRed ? "->" : "<-") + " at (" +
                       m.display_name(r.front().u) + ", " + m.display_name(r.front().v) + ")";
            return v;
        }
    }
    Pair ab{m.a(), m.b()};
    if (!holds(color(q0, Color::Green), m, m.a(), m.b())) {
        v.clause = Clause::GreenQueryMissing;
        v.pair = ab;
        v.reason = "G(Q0)(a,b) does not hold";
        return v;
    }
    if (holds(color(q0, Color::Red), m, m.a(), m.b())) {
        v.clause = Clause::RedQueryPresent;
        v.pair = ab;
        v.reason = "R(Q0)(a,b) holds";
        return v;
    }
    v.valid = true;
    return v;
}

inline Verdict validate_counterexample(const Structure& m, const std::vector<PathLanguage>& q, const PathLanguage& q0)
{
    return validate_counterexample(m, both_directions(q), q0);
}

}  // namespace escape
