#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "escape/chase.hpp"
#include "escape/homomorphism.hpp"
#include "escape/reduction.hpp"

namespace escape
{

struct GameConfig
{
    AlphabetPtr alphabet;
    PathLanguage q0;
    PathLanguage q_start;  // only used by the principle monitor
    std::vector<NamedLanguage> q;
    std::size_t step_budget = 10000;
    std::size_t word_budget = 1000;

    static GameConfig from(const ReductionOutput& r, std::size_t steps = 10000, std::size_t words = 1000)
    {
        return {r.alphabet, r.q0, r.q_start, r.languages, steps, words};
    }

    void validate() const
    {
        if (step_budget < 1)
            throw std::invalid_argument("step budget must be at least 1");
        if (!alphabet)
            throw std::invalid_argument("configuration has no alphabet");
        auto same = [&](const PathLanguage& l) { return l.alphabet() && *l.alphabet() == *alphabet; };
        if (!same(q0))
            throw std::invalid_argument("q0 uses a different alphabet");
        for (const auto& l : q)
            if (!same(l.language))
                throw std::invalid_argument("language " + l.name + " uses a different alphabet");
        if (enumerate_words(q0, word_budget).words.empty())
            throw std::invalid_argument("word budget too small to name any word of q0");
    }
};

/// A validated configuration with the derived constraint set and colored
/// query languages every play needs.
class Arena
{
public:
    explicit Arena(GameConfig cfg) : cfg_(std::move(cfg))
    {
        cfg_.validate();
        std::vector<PathLanguage> langs;
        std::vector<std::string> names;
        std::optional<PathLanguage> punish, bad;
        for (std::size_t i = 0; i < cfg_.q.size(); ++i) {
            const auto& l = cfg_.q[i];
            langs.push_back(l.language);
            names.push_back(l.name);
            if (l.group == Group::Good)
                continue;
            punishing_.push_back(i);
            punish = punish ? unite(*punish, l.language) : l.language;
            if (l.group == Group::Bad)
                bad = bad ? unite(*bad, l.language) : l.language;
        }
        constraints_ = both_directions(langs, names);
        red_q0_ = color(cfg_.q0, Color::Red);
        green_q0_ = color(cfg_.q0, Color::Green);
        if (!cfg_.q_start.empty())
            green_start_ = color(cfg_.q_start, Color::Green);
        if (punish)
            green_punish_ = color(*punish, Color::Green);
        if (bad) {
            green_bad_ = color(*bad, Color::Green);
            red_bad_ = color(*bad, Color::Red);
        }
    }

    Arena(const Arena&) = delete;
    Arena& operator=(const Arena&) = delete;

    const GameConfig& config() const { return cfg_; }
    const Alphabet& alphabet() const { return *cfg_.alphabet; }
    const ConstraintSet& constraints() const { return constraints_; }
    std::size_t language_count() const { return cfg_.q.size(); }
    const NamedLanguage& language(std::size_t i) const { return cfg_.q.at(i); }
    static std::size_t language_of(const Request& r) { return r.constraint / 2; }
    const PathLanguage& green_q0() const { return green_q0_; }
    const PathLanguage& red_q0() const { return red_q0_; }
    const std::optional<PathLanguage>& green_start() const { return green_start_; }
    const std::vector<std::size_t>& punishing() const { return punishing_; }

    std::optional<std::size_t> find(std::string_view name) const
    {
        for (std::size_t i = 0; i < cfg_.q.size(); ++i)
            if (cfg_.q[i].name == name)
                return i;
        return std::nullopt;
    }

    std::size_t require(std::string_view name) const
    {
        auto i = find(name);
        if (!i)
            throw std::out_of_range("no language named '" + std::string(name) + "'");
        return *i;
    }

    std::string describe(const Request& r) const
    {
        const auto& t = constraints_.at(r.constraint);
        return t.name() + (t.direction() == Direction::GreenToRed ? "->" : "<-");
    }

    bool lost(const Structure& d) const { return holds(red_q0_, d, d.a(), d.b()); }

    /// G(bad or ugly)(a,b): Crocodile can pick a request whose every answer loses.
    bool punishable(const Structure& d) const { return green_punish_ && holds(*green_punish_, d, d.a(), d.b()); }

    bool bad_path(const Structure& d) const
    {
        return green_bad_ && (holds(*green_bad_, d, d.a(), d.b()) || holds(*red_bad_, d, d.a(), d.b()));
    }

    /// Requests of both constraints of language i, in chase order.
    std::vector<Request> requests_for(std::size_t i, const Structure& d) const
    {
        auto out = requests_of(constraints_.at(2 * i), 2 * i, d);
        auto back = requests_of(constraints_.at(2 * i + 1), 2 * i + 1, d);
        out.insert(out.end(), back.begin(), back.end());
        return out;
    }

    /// Head words of a constraint, shortlex, cut at the word budget.
    const WordList<ColoredWord>& head_words(std::size_t constraint) const
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = heads_.find(constraint);
        if (it == heads_.end())
            it = heads_.emplace(constraint, enumerate_colored_words(constraints_.at(constraint).head(), cfg_.word_budget))
                     .first;
        return it->second;
    }

private:
    GameConfig cfg_;
    ConstraintSet constraints_;
    PathLanguage red_q0_, green_q0_;
    std::optional<PathLanguage> green_start_, green_punish_, green_bad_, red_bad_;
    std::vector<std::size_t> punishing_;
    mutable std::mutex mu_;
    mutable std::map<std::size_t, WordList<ColoredWord>> heads_;
};

// --- Fugitive ------------------------------------------------------------------

struct Move
{
    ColoredWord word;
    std::vector<std::string> names;  // for the interior vertices
    std::string note;
};

struct PolicyFault : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

class FugitivePolicy
{
public:
    virtual ~FugitivePolicy() = default;
    virtual std::string describe() const = 0;
    virtual Move initial(const Arena& arena) = 0;
    /// `step` is the 1-based number of the move being answered.
    virtual Move respond(const Arena& arena, const Structure& d, const Request& r, std::size_t step) = 0;
    /// Called after every position change with the vertices just created.
    virtual void observe(const Structure&, std::span<const VertexId>) {}
    virtual std::optional<std::string> certificate_error(const Structure&) const { return std::nullopt; }
};

using ShadeOracle = std::function<std::uint8_t(const GridEdge&)>;

inline ShadeOracle uniform_oracle(std::uint8_t shade)
{
    return [shade](const GridEdge&) { return shade; };
}

/// Shades from a grid shading where it has the edge, gray elsewhere.
inline ShadeOracle shading_oracle(const TilingInstance& inst, const GridShading& s)
{
    auto shading = std::make_shared<GridShading>(s);
    auto gray = inst.gray();
    return [shading, gray](const GridEdge& g) { return shading->contains(g) ? shading->at(g).shade : gray; };
}

inline std::optional<std::pair<int, int>> grid_coordinates(std::string_view name)
{
    if (name.size() < 4 || name[0] != 'v')
        return std::nullopt;
    auto comma = name.find(',');
    if (comma == std::string_view::npos)
        return std::nullopt;
    auto number = [](std::string_view t) -> std::optional<int> {
        if (t.empty() || t.size() > 6)
            return std::nullopt;
        int x = 0;
        for (char c : t) {
            if (c < '0' || c > '9')
                return std::nullopt;
            x = x * 10 + (c - '0');
        }
        return x;
    };
    auto i = number(name.substr(1, comma - 1));
    auto j = number(name.substr(comma + 1));
    if (!i || !j)
        return std::nullopt;
    return std::pair{*i, *j};
}

/// Red labels warm, green labels cold.
inline bool obeys_temperature(const ColoredWord& w)
{
    for (const auto& l : w)
        if (l.symbol.has_temp() && (l.color == Color::Red) != l.symbol.warm())
            return false;
    return true;
}

inline ColoredWord erase_shades(ColoredWord w)
{
    for (auto& l : w)
        if (l.symbol.is_grid())
            l.symbol.shade = 0;
    return w;
}

/// Exit choice for the dollar-or-continue requests: exit at the k-th one.
struct ExitScript
{
    std::optional<int> exit_at;

    static ExitScript never() { return {}; }
    static ExitScript at(int k) { return {k}; }
};

struct Alternative
{
    ColoredWord word;
    std::string verdict;  // "chosen", "survives", "loses", "punishable", "temperature"
};

/// Obeys the principles: words respect color/temperature, avoid immediate
/// loss and avoid giving Crocodile a punishing request; among survivors the
/// shortest, except on the dollar-or-continue request where the exit
/// script decides. Grid shades come from the oracle at the grid coordinates
/// encoded in vertex names.
class CanonicalFugitive : public FugitivePolicy
{
public:
    explicit CanonicalFugitive(ShadeOracle oracle = {}, ExitScript exits = {})
        : oracle_(std::move(oracle)), exits_(exits)
    {
    }

    std::string describe() const override
    {
        return exits_.exit_at ? "canonical(exit=" + std::to_string(*exits_.exit_at) + ")" : "canonical";
    }

    Move initial(const Arena& arena) override
    {
        const auto& alpha = arena.alphabet();
        auto gray = alpha.require_shade("gray");
        auto vshade = shade_at({1, 0, Orient::V}, arena);
        Move m;
        m.word = paint(Word{Symbol::make(Kind::Alpha, Temp::Cold), Symbol::make(Kind::X, Temp::Cold),
                            Symbol::grid(Letter::A, Orient::H, Temp::Cold, gray),
                            Symbol::grid(Letter::B, Orient::V, Temp::Cold, vshade), Symbol::make(Kind::Y, Temp::Cold),
                            Symbol::omega()},
                       Color::Green);
        m.names = {"a'", grid_vertex_name(0, 0), grid_vertex_name(1, 0), grid_vertex_name(1, 1), "b'"};
        m.note = "start word";
        return m;
    }

    Move respond(const Arena& arena, const Structure& d, const Request& r, std::size_t) override
    {
        alternatives_.clear();
        bool exit_request = is_exit_request(arena, r);
        if (exit_request)
            ++exit_requests_;
        const auto& words = arena.head_words(r.constraint);
        if (words.words.empty())
            throw PolicyFault("head language of " + arena.describe(r) + " has no word within the word budget");
        auto start = grid_coordinates(d.name(r.u));

        std::vector<ColoredWord> shapes;
        std::map<ColoredWord, std::size_t> seen;
        const auto& head = arena.constraints()[r.constraint].head();
        for (const auto& w : words.words) {
            if (!obeys_temperature(w)) {
                if (alternatives_.size() < kAlternativeLog)
                    alternatives_.push_back({w, "temperature"});
                continue;
            }
            auto key = erase_shades(w);
            if (seen.count(key))
                continue;
            auto shaded = shade_along(arena, w, start);
            seen[key] = shapes.size();
            shapes.push_back(head.accepts(shaded) ? shaded : w);
        }
        std::string note;
        if (shapes.empty()) {
            note = "no temperature-respecting word; ";
            for (const auto& w : words.words) {
                auto key = erase_shades(w);
                if (!seen.count(key)) {
                    seen[key] = shapes.size();
                    shapes.push_back(w);
                }
            }
        }

        bool was_punishable = arena.punishable(d);
        std::vector<std::size_t> survivors;
        for (std::size_t i = 0; i < shapes.size() && i < kLookahead; ++i) {
            Structure next = d;
            next.append_path(shapes[i], r.u, r.v);
            std::string verdict = "survives";
            if (arena.lost(next))
                verdict = "loses";
            else if (!was_punishable && arena.punishable(next))
                verdict = "punishable";
            else
                survivors.push_back(i);
            alternatives_.push_back({shapes[i], verdict});
        }
        std::size_t pick = 0;
        if (survivors.empty())
            note += "every alternative loses";
        else
            pick = choose(arena, shapes, survivors, exit_request);
        for (auto& a : alternatives_)
            if (a.word == shapes[pick] && a.verdict != "temperature")
                a.verdict = "chosen";

        Move m;
        m.word = shapes[pick];
        m.names = names_along(d, m.word, start);
        m.note = note;
        return m;
    }

    const std::vector<Alternative>& last_alternatives() const { return alternatives_; }
    int exit_requests_seen() const { return exit_requests_; }

protected:
    static constexpr std::size_t kLookahead = 64;
    static constexpr std::size_t kAlternativeLog = 16;

    virtual std::uint8_t shade_at(const GridEdge& g, const Arena& arena)
    {
        if (oracle_)
            return oracle_(g);
        return arena.alphabet().require_shade("gray");
    }

    virtual std::size_t choose(const Arena&, const std::vector<ColoredWord>& shapes,
                               const std::vector<std::size_t>& survivors, bool exit_request)
    {
        if (exit_request) {
            bool exit = exits_.exit_at && *exits_.exit_at == exit_requests_;
            for (auto i : survivors) {
                const auto& w = shapes[i];
                if (exit && w.front().symbol.kind == Kind::Dollar)
                    return i;
                if (!exit && w.size() == 3 && w.front().symbol.is_grid() && w.front().symbol.letter == Letter::A)
                    return i;
            }
        }
        return survivors.front();
    }

    static bool is_exit_request(const Arena& arena, const Request& r)
    {
        const auto& t = arena.constraints()[r.constraint];
        return t.name() == "good15" && t.direction() == Direction::RedToGreen;
    }

    ColoredWord shade_along(const Arena& arena, ColoredWord w, std::optional<std::pair<int, int>> at)
    {
        for (auto& l : w) {
            if (!l.symbol.is_grid())
                continue;
            if (!at)
                break;
            l.symbol.shade = shade_at({at->first, at->second, l.symbol.orient}, arena);
            if (l.symbol.orient == Orient::H)
                ++at->first;
            else
                ++at->second;
        }
        return w;
    }

    static std::vector<std::string> names_along(const Structure& d, const ColoredWord& w,
                                                std::optional<std::pair<int, int>> at)
    {
        std::vector<std::string> names;
        for (std::size_t p = 0; p + 1 < w.size(); ++p) {
            const auto& s = w[p].symbol;
            if (at && s.is_grid()) {
                if (s.orient == Orient::H)
                    ++at->first;
                else
                    ++at->second;
            } else {
                at.reset();
            }
            auto id = d.vertex_count() + p;
            names.push_back(at ? grid_vertex_name(at->first, at->second) : "u" + std::to_string(id));
        }
        return names;
    }

    ShadeOracle oracle_;
    ExitScript exits_;
    int exit_requests_ = 0;
    std::vector<Alternative> alternatives_;
};

/// Canonical behaviour with overrides: a fixed initial word and fixed
/// answers at chosen move numbers.
class ScriptedFugitive : public CanonicalFugitive
{
public:
    ScriptedFugitive(std::optional<ColoredWord> start, std::map<std::size_t, ColoredWord> answers,
                     ShadeOracle oracle = {}, ExitScript exits = {})
        : CanonicalFugitive(std::move(oracle), exits), start_(std::move(start)), answers_(std::move(answers))
    {
    }

    std::string describe() const override { return "scripted"; }

    Move initial(const Arena& arena) override
    {
        if (!start_)
            return CanonicalFugitive::initial(arena);
        Move m;
        m.word = *start_;
        for (std::size_t p = 0; p + 1 < m.word.size(); ++p)
            m.names.push_back("u" + std::to_string(2 + p));
        m.note = "scripted start";
        return m;
    }

    Move respond(const Arena& arena, const Structure& d, const Request& r, std::size_t step) override
    {
        auto it = answers_.find(step);
        if (it == answers_.end())
            return CanonicalFugitive::respond(arena, d, r, step);
        if (is_exit_request(arena, r))
            ++exit_requests_;
        Move m;
        m.word = it->second;
        m.names = names_along(d, m.word, grid_coordinates(d.name(r.u)));
        m.note = "scripted answer";
        return m;
    }

private:
    std::optional<ColoredWord> start_;
    std::map<std::size_t, ColoredWord> answers_;
};

/// Principle-obeying fugitive choosing uniformly among surviving shapes and
/// shading every grid symbol at random.
class RandomFugitive : public CanonicalFugitive
{
public:
    explicit RandomFugitive(std::uint64_t seed) : seed_(seed), rng_(seed) {}

    std::string describe() const override { return "random(seed=" + std::to_string(seed_) + ")"; }

    Move initial(const Arena& arena) override
    {
        auto m = CanonicalFugitive::initial(arena);
        m.word[3].symbol.shade = shade_at({1, 0, Orient::V}, arena);
        return m;
    }

protected:
    std::uint8_t shade_at(const GridEdge&, const Arena& arena) override
    {
        std::uniform_int_distribution<std::size_t> pick(0, arena.alphabet().shade_count() - 1);
        return static_cast<std::uint8_t>(pick(rng_));
    }

    std::size_t choose(const Arena&, const std::vector<ColoredWord>&, const std::vector<std::size_t>& survivors,
                       bool) override
    {
        std::uniform_int_distribution<std::size_t> pick(0, survivors.size() - 1);
        return survivors[pick(rng_)];
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 rng_;
};

/// Copies head paths from a target structure along a homomorphism, which
/// it extends with every move.
class LiftingFugitive : public FugitivePolicy
{
public:
    explicit LiftingFugitive(std::shared_ptr<const Structure> target) : target_(std::move(target)) {}

    std::string describe() const override { return "lifting"; }

    Move initial(const Arena& arena) override
    {
        const auto& m = *target_;
        auto w = find_path(arena.green_q0(), m, m.a(), m.b());
        if (!w)
            throw PolicyFault("target has no green q0 path from a to b");
        map_ = VertexMap(2);
        map_.set(0, m.a());
        map_.set(1, m.b());
        return lift(*w, 2);
    }

    Move respond(const Arena& arena, const Structure& d, const Request& r, std::size_t) override
    {
        const auto& m = *target_;
        auto hu = map_(r.u), hv = map_(r.v);
        const auto& t = arena.constraints()[r.constraint];
        auto w = find_path(t.head(), m, hu, hv);
        if (!w)
            throw PolicyFault("target has no " + arena.describe(r) + " head path between " + m.display_name(hu) +
                              " and " + m.display_name(hv));
        return lift(*w, d.vertex_count());
    }

    void observe(const Structure&, std::span<const VertexId> fresh) override
    {
        previous_ = map_;
        if (fresh.size() != pending_.size())
            throw std::logic_error("lifting: fresh vertex count differs from the copied path");
        for (std::size_t i = 0; i < fresh.size(); ++i)
            map_.set(fresh[i], pending_[i]);
        pending_.clear();
    }

    std::optional<std::string> certificate_error(const Structure& d) const override
    {
        std::string why;
        if (!is_homomorphism(d, *target_, map_, &why))
            return why;
        if (!map_.extends(previous_))
            return "map does not extend the previous one";
        return std::nullopt;
    }

    const VertexMap& map() const { return map_; }

private:
    Move lift(const Witness& w, std::size_t first_id)
    {
        Move m;
        m.word = w.word;
        pending_.assign(w.vertices.begin() + 1, w.vertices.end() - 1);
        for (std::size_t i = 0; i < pending_.size(); ++i)
            m.names.push_back(target_->display_name(pending_[i]) + "#" + std::to_string(first_id + i));
        return m;
    }

    std::shared_ptr<const Structure> target_;
    VertexMap map_, previous_;
    std::vector<VertexId> pending_;
};

// --- Crocodile -------------------------------------------------------------------

enum class RequestOrder : std::uint8_t { Chase, Random };

struct CrocodileStrategy
{
    std::vector<std::size_t> sequence;  // indices into the configuration's q
    RequestOrder order = RequestOrder::Chase;
    std::uint64_t seed = 0;
    /// Serve punishing requests at (a,b) first, and single-letter requests
    /// first while a color/temperature mismatch is present.
    bool guarded = false;
    bool stop_on_loss = true;

    static CrocodileStrategy from_good(const Arena& arena, const StrategySequence& numbers)
    {
        CrocodileStrategy s;
        for (int n : numbers)
            s.sequence.push_back(arena.require("good" + std::to_string(n)));
        return s;
    }
};

inline bool temperature_mismatch(const Structure& d)
{
    for (const auto& e : d.edges())
        if (e.label.symbol.has_temp() && (e.label.color == Color::Red) != e.label.symbol.warm())
            return true;
    return false;
}

// --- play ------------------------------------------------------------------------

enum class Outcome : std::uint8_t { FugitiveLost, Quiescent, BudgetExhausted, PolicyFault };

inline const char* outcome_name(Outcome o)
{
    switch (o) {
    case Outcome::FugitiveLost: return "FugitiveLost";
    case Outcome::Quiescent: return "Quiescent";
    case Outcome::BudgetExhausted: return "BudgetExhausted";
    case Outcome::PolicyFault: return "PolicyFault";
    }
    return "?";
}

struct StepRecord
{
    std::size_t step = 0;
    Request request;
    ColoredWord word;
    std::vector<std::string> names;
    std::vector<VertexId> fresh;
    std::size_t phase = 0;
    bool guard = false;
    std::string note;
};

struct PhaseRecord
{
    std::size_t index = 0;
    std::size_t language = 0;
    std::size_t first_step = 0;  // first move number of the phase
    std::size_t end_step = 0;    // moves made when it ended
};

struct PlayTranscript
{
    ColoredWord initial;
    std::vector<std::string> initial_names;
    std::vector<StepRecord> steps;
    std::vector<PhaseRecord> phases;
    Outcome outcome = Outcome::Quiescent;
    std::size_t outcome_step = 0;
    std::optional<std::size_t> lost_at;
    std::string detail;
    std::string fugitive;
    std::uint64_t seed = 0;
    Structure final;
    std::uint64_t final_hash = 0;
};

struct PlayHooks
{
    std::function<void(const Structure&, const StepRecord&)> on_step;
    std::function<void(const Structure&, const PhaseRecord&)> on_phase_end;
};

inline Structure position_from(const ColoredWord& w, std::span<const std::string> names)
{
    Structure d;
    d.append_path(w, d.a(), d.b(), names);
    return d;
}

/// (G(w))[a,b] for the policy's word w, which must lie in q0.
inline Structure initial_position(const Arena& arena, FugitivePolicy& policy, Move* chosen = nullptr)
{
    auto m = policy.initial(arena);
    if (!arena.green_q0().accepts(m.word))
        throw IllegalWord("initial word is not a green word of q0");
    auto d = position_from(m.word, m.names);
    std::vector<VertexId> fresh;
    for (VertexId v = 2; v < d.vertex_count(); ++v)
        fresh.push_back(v);
    policy.observe(d, fresh);
    if (chosen)
        *chosen = std::move(m);
    return d;
}

inline PlayTranscript play(const Arena& arena, FugitivePolicy& fugitive, const CrocodileStrategy& croc,
                           const PlayHooks& hooks = {})
{
    PlayTranscript t;
    t.fugitive = fugitive.describe();
    t.seed = croc.seed;
    for (auto l : croc.sequence)
        if (l >= arena.language_count())
            throw std::out_of_range("strategy names language index " + std::to_string(l));

    Move first;
    Structure d = initial_position(arena, fugitive, &first);
    t.initial = first.word;
    t.initial_names = first.names;
    std::mt19937_64 rng(croc.seed);
    const std::size_t budget = arena.config().step_budget;
    std::size_t step = 0;

    auto finish = [&](Outcome o, std::string detail) {
        t.outcome = o;
        t.outcome_step = step;
        t.detail = std::move(detail);
        t.final = d;
        t.final_hash = d.hash();
        return t;
    };
    if (arena.lost(d)) {
        t.lost_at = 0;
        if (croc.stop_on_loss)
            return finish(Outcome::FugitiveLost, "R(q0)(a,b) holds initially");
    }

    std::vector<std::size_t> letters;  // good1..good9
    for (int n = 1; n <= 9; ++n)
        if (auto i = arena.find("good" + std::to_string(n)))
            letters.push_back(*i);

    auto choose = [&](const std::vector<Request>& rs) {
        if (croc.order == RequestOrder::Chase)
            return rs.front();
        std::uniform_int_distribution<std::size_t> pick(0, rs.size() - 1);
        return rs[pick(rng)];
    };
    auto guard = [&]() -> std::optional<Request> {
        if (!croc.guarded)
            return std::nullopt;
        if (arena.punishable(d)) {
            for (auto l : arena.punishing()) {
                const auto& c = arena.constraints()[2 * l];
                if (holds(c.body(), d, d.a(), d.b()) && !holds(c.head(), d, d.a(), d.b()))
                    return Request{d.a(), d.b(), 2 * l};
            }
        }
        if (temperature_mismatch(d))
            for (auto l : letters) {
                auto rs = arena.requests_for(l, d);
                if (!rs.empty())
                    return choose(rs);
            }
        return std::nullopt;
    };

    for (std::size_t p = 0; p < croc.sequence.size(); ++p) {
        PhaseRecord phase{p, croc.sequence[p], step + 1, step};
        for (;;) {
            bool forced = false;
            std::optional<Request> r = guard();
            if (r) {
                forced = true;
            } else {
                auto rs = arena.requests_for(croc.sequence[p], d);
                if (rs.empty())
                    break;
                r = choose(rs);
            }
            if (step >= budget)
                return finish(Outcome::BudgetExhausted, "step budget reached in phase " + std::to_string(p));
            Move m;
            std::vector<VertexId> fresh;
            try {
                m = fugitive.respond(arena, d, *r, step + 1);
                fresh = add_in_place(d, arena.constraints(), *r, m.word, m.names);
                fugitive.observe(d, fresh);
            } catch (const PolicyFault& e) {
                return finish(Outcome::PolicyFault, e.what());
            } catch (const IllegalWord& e) {
                return finish(Outcome::PolicyFault, e.what());
            }
            ++step;
            StepRecord rec{step, *r, m.word, m.names, fresh, p, forced, m.note};
            if (auto err = fugitive.certificate_error(d))
                return finish(Outcome::PolicyFault, "certificate broken at step " + std::to_string(step) + ": " + *err);
            t.steps.push_back(rec);
            if (hooks.on_step)
                hooks.on_step(d, rec);
            if (!t.lost_at && arena.lost(d)) {
                t.lost_at = step;
                if (croc.stop_on_loss)
                    return finish(Outcome::FugitiveLost, "R(q0)(a,b) after " + arena.describe(*r));
            }
        }
        phase.end_step = step;
        t.phases.push_back(phase);
        if (hooks.on_phase_end)
            hooks.on_phase_end(d, phase);
    }
    if (t.lost_at)
        return finish(Outcome::FugitiveLost, "R(q0)(a,b) since step " + std::to_string(*t.lost_at));
    return finish(Outcome::Quiescent, "strategy exhausted");
}

/// Rebuilds every position of a transcript; throws on any divergence.
inline Structure replay(const Arena& arena, const PlayTranscript& t,
                        const std::function<void(const Structure&, std::size_t)>& each = {})
{
    if (!arena.green_q0().accepts(t.initial))
        throw IllegalWord("transcript starts with a word outside q0");
    Structure d = position_from(t.initial, t.initial_names);
    if (each)
        each(d, 0);
    for (const auto& s : t.steps) {
        auto fresh = add_in_place(d, arena.constraints(), s.request, s.word, s.names);
        if (fresh != s.fresh)
            throw std::runtime_error("replay diverged at step " + std::to_string(s.step));
        if (each)
            each(d, s.step);
    }
    return d;
}

// --- principles ---------------------------------------------------------------

enum class Principle : std::uint8_t { I = 1, II = 2, III = 3 };

struct Violation
{
    std::size_t step = 0;
    Principle principle = Principle::I;
    std::string detail;
};

struct StepStatus
{
    std::size_t step = 0;
    bool p2_ready = false;
    std::string why_not;
};

struct MonitorReport
{
    std::vector<Violation> violations;
    std::vector<StepStatus> status;

    bool clean() const { return violations.empty(); }
    std::size_t count(Principle p) const
    {
        std::size_t n = 0;
        for (const auto& v : violations)
            n += v.principle == p;
        return n;
    }
};

/// The P2-ready conditions other than containing D_0.
inline bool p2_ready(const Structure& d, std::string* why = nullptr)
{
    auto fail = [&](std::string msg) {
        if (why)
            *why = std::move(msg);
        return false;
    };
    auto is = [](const EdgeLabel& l, Kind k, Temp t, Color c) {
        return l.symbol.kind == k && l.symbol.temp == t && l.color == c;
    };
    auto a = d.a(), b = d.b();
    if (d.out(a).size() != 2 || !d.in(a).empty())
        return fail("a does not have exactly two incident edges");
    VertexId a1 = d.out(a)[0].other;
    bool green = false, red = false;
    for (const auto& arc : d.out(a)) {
        green |= arc.other == a1 && is(arc.label, Kind::Alpha, Temp::Cold, Color::Green);
        red |= arc.other == a1 && is(arc.label, Kind::Alpha, Temp::Warm, Color::Red);
    }
    if (!green || !red)
        return fail("a lacks G(alpha^C) and R(alpha^W) to one vertex");
    if (d.in(b).size() != 2 || !d.out(b).empty())
        return fail("b does not have exactly two incident edges");
    VertexId b1 = d.in(b)[0].other;
    green = red = false;
    for (const auto& arc : d.in(b)) {
        green |= arc.other == b1 && arc.label == EdgeLabel{Symbol::omega(), Color::Green};
        red |= arc.other == b1 && arc.label == EdgeLabel{Symbol::omega(), Color::Red};
    }
    if (!green || !red)
        return fail("b lacks G(omega) and R(omega) from one vertex");
    for (const auto& e : d.edges()) {
        if (e.label.symbol.kind == Kind::Alpha && (e.src != a || e.dst != a1))
            return fail("alpha edge away from (a, a')");
        if (e.label.symbol.kind == Kind::Omega && (e.src != b1 || e.dst != b))
            return fail("omega edge away from (b', b)");
    }
    auto bfs = [&](VertexId s, bool forward) {
        std::vector<int> dist(d.vertex_count(), -1);
        std::deque<VertexId> queue{s};
        dist[s] = 0;
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            for (const auto& arc : forward ? d.out(v) : d.in(v))
                if (dist[arc.other] < 0) {
                    dist[arc.other] = dist[v] + 1;
                    queue.push_back(arc.other);
                }
        }
        return dist;
    };
    auto from = bfs(a1, true), to = bfs(b1, false);
    for (VertexId v = 0; v < d.vertex_count(); ++v) {
        if (v == a || v == b)
            continue;
        if (from[v] < 0 || from[v] > 4)
            return fail("vertex " + d.display_name(v) + " is not within 4 of a'");
        if (to[v] < 0 || to[v] > 4)
            return fail("vertex " + d.display_name(v) + " is not within 4 of b'");
    }
    return true;
}

inline MonitorReport monitor_principles(const Arena& arena, const PlayTranscript& t)
{
    MonitorReport rep;
    if (arena.green_start() && !arena.green_start()->accepts(t.initial))
        rep.violations.push_back({0, Principle::I, "initial word is not in Q_start"});
    const auto& alpha = arena.alphabet();
    replay(arena, t, [&](const Structure& d, std::size_t step) {
        StepStatus st{step, false, {}};
        st.p2_ready = p2_ready(d, &st.why_not);
        rep.status.push_back(st);
        for (const auto& e : d.edges()) {
            if (e.label.symbol.has_temp() && (e.label.color == Color::Red) != e.label.symbol.warm()) {
                rep.violations.push_back({step, Principle::II,
                                          alpha.text(e.label) + " on " + d.display_name(e.src) + "->" +
                                              d.display_name(e.dst) + (st.p2_ready ? "" : " (not P2-ready)")});
                break;
            }
        }
        if (arena.bad_path(d))
            rep.violations.push_back({step, Principle::III, "bad path between a and b"});
    });
    return rep;
}

// --- stage pipeline -----------------------------------------------------------

struct PipelineOptions
{
    /// 1: S_start only. 2: S_{m+1}. 3: S_{m+1} followed by S_layer^{m+1}.
    int stages = 3;
    ExitScript exits;
    const GridShading* shading = nullptr;
    RequestOrder order = RequestOrder::Chase;
    std::uint64_t seed = 0;
    std::size_t step_budget = 10000;
};

struct ShapeCheck
{
    std::string stage;
    std::string expected;
    bool ok = false;
    std::string detail;
};

struct PipelineResult
{
    PlayTranscript transcript;
    MonitorReport monitor;
    std::vector<ShapeCheck> checks;
    Structure expected;
    std::optional<VertexMap> witness;  // final isomorphism, shades erased

    bool ok() const
    {
        if (transcript.outcome == Outcome::BudgetExhausted || transcript.outcome == Outcome::PolicyFault)
            return false;
        return std::all_of(checks.begin(), checks.end(), [](const ShapeCheck& c) { return c.ok; });
    }

    std::string report() const
    {
        std::string out = "outcome " + std::string(outcome_name(transcript.outcome)) + " after " +
                          std::to_string(transcript.outcome_step) + " moves";
        if (transcript.lost_at)
            out += " (R(q0)(a,b) from move " + std::to_string(*transcript.lost_at) + ")";
        out += "\n";
        for (const auto& c : checks)
            out += (c.ok ? "  ok    " : "  FAIL  ") + c.stage + ": expected " + c.expected +
                   (c.detail.empty() ? "" : " -- " + c.detail) + "\n";
        return out;
    }
};

inline std::string shape_name(const std::string& base, int m, std::optional<int> k, bool dollar)
{
    std::string s = base + "_" + std::to_string(m);
    if (k)
        s += "," + std::to_string(*k);
    return dollar ? s + "$" : s;
}

/// Runs S_{m+1} (then S_layer^{m+1}) against the canonical fugitive and
/// checks the position after S_start, after every cycle and after every
/// layer against the staircase, band and grid fixtures.
inline PipelineResult run_stage_pipeline(const TilingInstance& inst, int m, PipelineOptions opt = {})
{
    if (m < 1)
        throw std::invalid_argument("pipeline needs m >= 1");
    auto red = reduce(inst);
    Arena arena(GameConfig::from(red, opt.step_budget));
    ShadeOracle oracle = opt.shading ? shading_oracle(inst, *opt.shading) : uniform_oracle(inst.gray());
    CanonicalFugitive fugitive(oracle, opt.exits);

    auto k = opt.exits.exit_at;
    if (k && (*k < 1 || *k > m))
        throw std::invalid_argument("exit must satisfy 1 <= k <= m");
    int cycles = opt.stages >= 2 ? m : 0;
    int layers = opt.stages >= 3 ? m + 1 : 0;
    auto seq = strategies::stage(cycles + 1);
    auto layer_seq = strategies::layer(layers);
    seq.insert(seq.end(), layer_seq.begin(), layer_seq.end());
    auto croc = CrocodileStrategy::from_good(arena, seq);
    croc.order = opt.order;
    croc.seed = opt.seed;
    croc.stop_on_loss = false;

    // Phase index closing each stage, with the fixture expected there.
    struct Expect
    {
        std::string stage, name;
        std::function<Structure()> build;
    };
    std::map<std::size_t, Expect> expect;
    const auto start_len = strategies::start().size(), cycle_len = strategies::cycle().size(),
               layer_len = strategies::odd().size();
    const auto* sh = opt.shading;
    expect[start_len - 1] = {"S_start", "P_1", [&] { return build_P(inst, 1, sh); }};
    for (int c = 1; c <= cycles; ++c) {
        bool out = k && *k <= c;
        int n = out ? *k : c + 1;
        expect[start_len + c * cycle_len - 1] = {"cycle " + std::to_string(c), shape_name("P", n, {}, out),
                                                 [&inst, sh, n, out] { return build_P(inst, n, sh, out); }};
    }
    for (int j = 1; j <= layers; ++j) {
        int n = k ? *k : m + 1;
        int w = std::min(j, n);
        expect[start_len + cycles * cycle_len + j * layer_len - 1] = {
            "layer " + std::to_string(j), shape_name("L", n, w, k.has_value()),
            [&inst, sh, n, w, k] { return build_L(inst, n, w, sh, k.has_value()); }};
    }

    PipelineResult res;
    Structure last_expected;
    PlayHooks hooks;
    hooks.on_phase_end = [&](const Structure& d, const PhaseRecord& p) {
        auto it = expect.find(p.index);
        if (it == expect.end())
            return;
        auto fixture = it->second.build();
        ShapeCheck c{it->second.stage, it->second.name, false, {}};
        c.ok = isomorphic_mod_shades(d, fixture);
        if (!c.ok)
            c.detail = "got " + std::to_string(d.vertex_count()) + " vertices / " + std::to_string(d.edge_count()) +
                       " edges, fixture has " + std::to_string(fixture.vertex_count()) + " / " +
                       std::to_string(fixture.edge_count());
        res.checks.push_back(c);
        last_expected = std::move(fixture);
    };
    res.transcript = play(arena, fugitive, croc, hooks);
    if (res.checks.size() != expect.size())
        res.checks.push_back({"phases", std::to_string(expect.size()) + " stage ends", false,
                              "play stopped early: " + res.transcript.detail});
    res.expected = last_expected;
    const auto& final = res.transcript.final;
    ShapeCheck named{"final", "vertex-named fixture", false, {}};
    named.ok = equal_by_names(final, res.expected, &named.detail);
    res.checks.push_back(named);
    res.witness = find_isomorphism_mod_shades(final, res.expected);
    res.monitor = monitor_principles(arena, res.transcript);
    ShapeCheck principles{"principles", "no Principle I/II violation", false, {}};
    principles.ok = res.monitor.count(Principle::I) == 0 && res.monitor.count(Principle::II) == 0;
    if (!principles.ok)
        principles.detail = res.monitor.violations.front().detail;
    res.checks.push_back(principles);
    return res;
}

}  // namespace escape
