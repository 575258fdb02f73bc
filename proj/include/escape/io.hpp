#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "escape/game.hpp"
#include "escape/reduction.hpp"
#include "escape/tiling.hpp"

namespace escape::io
{

using json = nlohmann::json;

struct SchemaError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

template <class T>
T field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("field '") + key + "': " + e.what());
    }
}

inline const char* orient_text(Orient o) { return o == Orient::H ? "H" : "V"; }

inline Orient parse_orient(const std::string& s)
{
    if (s == "H")
        return Orient::H;
    if (s == "V")
        return Orient::V;
    throw SchemaError("orientation must be H or V, got '" + s + "'");
}

// --- instances and shadings ---------------------------------------------------

inline json tile_to_json(const TilingInstance& inst, const Tile& t)
{
    return {{"orient", orient_text(t.orient)}, {"shade", inst.shades()[t.shade]}};
}

inline json instance_to_json(const TilingInstance& inst)
{
    json forbidden = json::array();
    for (const auto& [c, d] : inst.forbidden())
        forbidden.push_back({tile_to_json(inst, c), tile_to_json(inst, d)});
    return {{"shades", inst.shades()}, {"forbidden", forbidden}};
}

/// {"shades": [...], "forbidden": [[{orient, shade}, {orient, shade}], ...] | "all"}
inline TilingInstance instance_from_json(const json& j)
{
    auto shades = field<std::vector<std::string>>(j, "shades");
    Alphabet probe(shades);
    auto tile = [&](const json& t) {
        auto name = field<std::string>(t, "shade");
        auto s = probe.shade_index(name);
        if (!s)
            throw SchemaError("unknown shade '" + name + "'");
        return Tile{parse_orient(field<std::string>(t, "orient")), *s};
    };
    std::set<ForbiddenPair> forbidden;
    if (j.contains("forbidden")) {
        const auto& f = j.at("forbidden");
        if (f.is_string()) {
            if (f.get<std::string>() != "all")
                throw SchemaError("forbidden must be a list or \"all\"");
            forbidden = TilingInstance::all_pairs(probe.shade_count());
        } else {
            for (const auto& p : f) {
                if (!p.is_array() || p.size() != 2)
                    throw SchemaError("forbidden pair must have two entries");
                forbidden.insert({tile(p[0]), tile(p[1])});
            }
        }
    }
    try {
        return TilingInstance(shades, forbidden);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
}

inline json shading_to_json(const TilingInstance& inst, const GridShading& s)
{
    json edges = json::array();
    for (std::size_t e = 0; e < s.edge_count(); ++e) {
        auto g = s.edge(e);
        edges.push_back({{"i", g.i}, {"j", g.j}, {"dir", orient_text(g.dir)}, {"orient", orient_text(s[e].orient)},
                         {"shade", inst.shades()[s[e].shade]}});
    }
    return {{"k", s.k()}, {"edges", edges}};
}

inline GridShading shading_from_json(const TilingInstance& inst, const json& j)
{
    GridShading s(field<int>(j, "k"));
    for (const auto& e : field<json>(j, "edges")) {
        GridEdge g{field<int>(e, "i"), field<int>(e, "j"), parse_orient(field<std::string>(e, "dir"))};
        if (!s.contains(g))
            throw SchemaError("edge outside the grid");
        auto name = field<std::string>(e, "shade");
        auto shade = inst.alphabet()->shade_index(name);
        if (!shade)
            throw SchemaError("unknown shade '" + name + "'");
        auto orient = e.contains("orient") ? parse_orient(field<std::string>(e, "orient")) : g.dir;
        s.at(g) = {orient, *shade};
    }
    return s;
}

// --- structures --------------------------------------------------------------

/// {"shades", "vertices": [names by id; 0 is a, 1 is b], "edges": [[src, dst, label]]}
inline json structure_to_json(const Alphabet& alpha, const Structure& d)
{
    json vertices = json::array();
    for (VertexId v = 0; v < d.vertex_count(); ++v)
        vertices.push_back(d.name(v));
    json edges = json::array();
    for (const auto& e : d.edges())
        edges.push_back({e.src, e.dst, alpha.text(e.label)});
    return {{"shades", alpha.shades()}, {"vertices", vertices}, {"edges", edges}};
}

inline Structure structure_from_json(const Alphabet& alpha, const json& j)
{
    if (j.contains("shades") && field<std::vector<std::string>>(j, "shades") != alpha.shades())
        throw SchemaError("structure uses a different shade set");
    auto names = field<std::vector<std::string>>(j, "vertices");
    if (names.size() < 2)
        throw SchemaError("a structure has at least the vertices a and b");
    Structure d(names[0], names[1]);
    for (std::size_t v = 2; v < names.size(); ++v)
        d.add_vertex(names[v]);
    for (const auto& e : field<json>(j, "edges")) {
        if (!e.is_array() || e.size() != 3)
            throw SchemaError("edge must be [src, dst, label]");
        auto src = e[0].get<VertexId>(), dst = e[1].get<VertexId>();
        if (!d.has_vertex(src) || !d.has_vertex(dst))
            throw SchemaError("edge endpoint is not a vertex");
        try {
            d.add_edge(src, dst, alpha.parse_label(e[2].get<std::string>()));
        } catch (const ParseError& err) {
            throw SchemaError(err.what());
        }
    }
    return d;
}

inline AlphabetPtr alphabet_of(const json& j) { return std::make_shared<const Alphabet>(field<std::vector<std::string>>(j, "shades")); }

// --- languages -----------------------------------------------------------------

inline json pattern_to_json(const Alphabet& alpha, const SymbolPattern& p)
{
    static const char* kinds[] = {"alpha", "x", "y", "$", "omega", "grid"};
    json j = json::object();
    if (p.kind)
        j["kind"] = kinds[static_cast<int>(*p.kind)];
    if (p.temp)
        j["temp"] = *p.temp == Temp::Cold ? "C" : "W";
    if (p.letter)
        j["letter"] = *p.letter == Letter::A ? "A" : "B";
    if (p.orient)
        j["orient"] = orient_text(*p.orient);
    if (p.shade)
        j["shade"] = alpha.shade_name(*p.shade);
    return j;
}

inline SymbolPattern pattern_from_json(const Alphabet& alpha, const json& j)
{
    SymbolPattern p;
    if (j.contains("kind")) {
        static const std::map<std::string, Kind> kinds{{"alpha", Kind::Alpha}, {"x", Kind::X},
                                                       {"y", Kind::Y},         {"$", Kind::Dollar},
                                                       {"omega", Kind::Omega}, {"grid", Kind::Grid}};
        auto it = kinds.find(field<std::string>(j, "kind"));
        if (it == kinds.end())
            throw SchemaError("unknown symbol kind");
        p.kind = it->second;
    }
    if (j.contains("temp"))
        p.temp = field<std::string>(j, "temp") == "W" ? Temp::Warm : Temp::Cold;
    if (j.contains("letter"))
        p.letter = field<std::string>(j, "letter") == "B" ? Letter::B : Letter::A;
    if (j.contains("orient"))
        p.orient = parse_orient(field<std::string>(j, "orient"));
    if (j.contains("shade"))
        p.shade = alpha.require_shade(field<std::string>(j, "shade"));
    return p;
}

inline json language_to_json(const PathLanguage& l)
{
    static const char* spaces[] = {"base", "green", "red", "mixed"};
    const auto& alpha = *l.alphabet();
    json transitions = json::array();
    for (const auto& t : l.transitions()) {
        json tj{{"from", t.from}, {"to", t.to}, {"pattern", pattern_to_json(alpha, t.pattern)}};
        if (t.color)
            tj["color"] = *t.color == Color::Green ? "G" : "R";
        transitions.push_back(tj);
    }
    return {{"colorspace", spaces[static_cast<int>(l.colorspace())]},
            {"states", l.state_count()},
            {"accept", l.accept_states()},
            {"transitions", transitions}};
}

inline PathLanguage language_from_json(const AlphabetPtr& alpha, const json& j)
{
    static const std::map<std::string, Colorspace> spaces{
        {"base", Colorspace::Base}, {"green", Colorspace::Green}, {"red", Colorspace::Red}, {"mixed", Colorspace::Mixed}};
    auto cs = spaces.find(field<std::string>(j, "colorspace"));
    if (cs == spaces.end())
        throw SchemaError("unknown colorspace");
    std::vector<Transition> ts;
    for (const auto& t : field<json>(j, "transitions")) {
        Transition tr{field<std::uint32_t>(t, "from"), field<std::uint32_t>(t, "to"),
                      pattern_from_json(*alpha, field<json>(t, "pattern")), std::nullopt};
        if (t.contains("color"))
            tr.color = field<std::string>(t, "color") == "R" ? Color::Red : Color::Green;
        ts.push_back(tr);
    }
    try {
        return PathLanguage(alpha, cs->second, field<std::uint32_t>(j, "states"),
                            field<std::vector<std::uint32_t>>(j, "accept"), ts);
    } catch (const LanguageError& e) {
        throw SchemaError(e.what());
    }
}

// --- bundles -------------------------------------------------------------------

struct Bundle
{
    TilingInstance instance;
    ReductionOutput reduction;
};

inline json bundle_to_json(const TilingInstance& inst, const ReductionOutput& r)
{
    json langs = json::array();
    for (const auto& l : r.languages)
        langs.push_back({{"name", l.name},
                         {"group", group_name(l.group)},
                         {"number", l.number},
                         {"description", l.description},
                         {"words", l.language.word_count()},
                         {"automaton", language_to_json(l.language)}});
    return {{"instance", instance_to_json(inst)},
            {"alphabet_size", r.alphabet->size()},
            {"languages", langs},
            {"q_start", language_to_json(r.q_start)},
            {"q0", language_to_json(r.q0)}};
}

inline Bundle bundle_from_json(const json& j)
{
    auto inst = instance_from_json(field<json>(j, "instance"));
    ReductionOutput r;
    r.alphabet = inst.alphabet();
    static const std::map<std::string, Group> groups{{"good", Group::Good}, {"bad", Group::Bad}, {"ugly", Group::Ugly}};
    for (const auto& l : field<json>(j, "languages")) {
        auto g = groups.find(field<std::string>(l, "group"));
        if (g == groups.end())
            throw SchemaError("unknown language group");
        r.languages.push_back({field<std::string>(l, "name"), g->second, field<int>(l, "number"),
                               l.value("description", std::string{}),
                               language_from_json(r.alphabet, field<json>(l, "automaton"))});
    }
    r.q_start = language_from_json(r.alphabet, field<json>(j, "q_start"));
    r.q0 = language_from_json(r.alphabet, field<json>(j, "q0"));
    return {std::move(inst), std::move(r)};
}

/// Reads either a bundle or a bare instance (reduced on the fly).
inline Bundle load_bundle_or_instance(const std::string& path)
{
    auto j = read_json_file(path);
    if (j.contains("languages"))
        return bundle_from_json(j);
    auto inst = instance_from_json(j);
    auto r = reduce(inst);
    return {std::move(inst), std::move(r)};
}

inline std::string language_listing(const ReductionOutput& r)
{
    std::ostringstream out;
    out << "alphabet: " << r.alphabet->size() << " symbols, shades";
    for (const auto& s : r.alphabet->shades())
        out << ' ' << s;
    out << "\n";
    out << "good " << r.good_count() << ", bad " << r.bad_count() << ", ugly " << r.ugly_count() << "\n";
    for (const auto& l : r.languages)
        out << l.name << "\t" << l.description << "\t" << l.language.word_count() << " words, max length "
            << l.language.max_length() << "\n";
    return out.str();
}

// --- DOT -----------------------------------------------------------------------

inline std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

inline std::string to_dot(const Alphabet& alpha, const Structure& d, bool erase = false)
{
    const Structure& s = d;
    std::ostringstream out;
    out << "digraph structure {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
    for (VertexId v = 0; v < s.vertex_count(); ++v) {
        out << "  n" << v << " [label=" << quote(s.display_name(v));
        if (v == s.a() || v == s.b())
            out << ", shape=doublecircle";
        out << "];\n";
    }
    for (const auto& e : s.edges()) {
        auto label = e.label;
        std::string text = alpha.text(label.symbol);
        if (erase && label.symbol.is_grid())
            text = text.substr(0, text.find(':'));
        out << "  n" << e.src << " -> n" << e.dst << " [color=" << (label.color == Color::Green ? "green" : "red")
            << ", fontcolor=" << (label.color == Color::Green ? "darkgreen" : "red3") << ", label=" << quote(text)
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

// --- transcripts ---------------------------------------------------------------

inline std::string join_names(const std::vector<std::string>& names)
{
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i)
        out += (i ? "|" : "") + names[i];
    return out;
}

inline std::vector<std::string> split_names(const std::string& s)
{
    std::vector<std::string> out;
    if (s.empty())
        return out;
    std::size_t i = 0;
    for (;;) {
        auto j = s.find('|', i);
        out.push_back(s.substr(i, j - i));
        if (j == std::string::npos)
            return out;
        i = j + 1;
    }
}

/// Header lines start with '#'; one row per served request:
/// step, group, index, direction, u, v, word, names.
inline std::string transcript_to_tsv(const Arena& arena, const PlayTranscript& t)
{
    const auto& alpha = arena.alphabet();
    std::ostringstream out;
    out << "# seed\t" << t.seed << "\n";
    out << "# fugitive\t" << t.fugitive << "\n";
    out << "# outcome\t" << outcome_name(t.outcome) << "\t" << t.outcome_step << "\n";
    out << "# final_hash\t" << t.final_hash << "\n";
    out << "# initial\t" << alpha.text(t.initial) << "\t" << join_names(t.initial_names) << "\n";
    out << "step\tgroup\tindex\tdirection\tu\tv\tword\tnames\n";
    for (const auto& s : t.steps) {
        const auto& l = arena.language(Arena::language_of(s.request));
        out << s.step << '\t' << group_name(l.group) << '\t' << l.number << '\t'
            << (s.request.constraint % 2 == 0 ? "->" : "<-") << '\t' << s.request.u << '\t' << s.request.v << '\t'
            << alpha.text(s.word) << '\t' << join_names(s.names) << "\n";
    }
    return out.str();
}

inline std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    for (;;) {
        auto j = line.find('\t', i);
        out.push_back(line.substr(i, j - i));
        if (j == std::string::npos)
            return out;
        i = j + 1;
    }
}

/// Parses the rows back; fresh vertex ids are recomputed on replay.
inline PlayTranscript transcript_from_tsv(const Arena& arena, const std::string& text)
{
    PlayTranscript t;
    const auto& alpha = arena.alphabet();
    std::istringstream in(text);
    std::string line;
    bool header = false;
    std::size_t next_id = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto cols = split_tabs(line);
        if (line[0] == '#') {
            if (cols[0] == "# seed" && cols.size() > 1)
                t.seed = std::stoull(cols[1]);
            else if (cols[0] == "# fugitive" && cols.size() > 1)
                t.fugitive = cols[1];
            else if (cols[0] == "# final_hash" && cols.size() > 1)
                t.final_hash = std::stoull(cols[1]);
            else if (cols[0] == "# initial" && cols.size() > 1) {
                t.initial = alpha.parse_colored_word(cols[1]);
                t.initial_names = cols.size() > 2 ? split_names(cols[2]) : std::vector<std::string>{};
                next_id = 2 + t.initial.size() - 1;
            }
            continue;
        }
        if (!header) {
            if (cols.empty() || cols[0] != "step")
                throw SchemaError("transcript lacks the column header");
            header = true;
            continue;
        }
        if (cols.size() < 7)
            throw SchemaError("transcript row has " + std::to_string(cols.size()) + " columns");
        StepRecord s;
        s.step = std::stoull(cols[0]);
        auto lang = arena.require(cols[1] + cols[2]);
        if (cols[3] != "->" && cols[3] != "<-")
            throw SchemaError("direction must be -> or <-");
        s.request = {static_cast<VertexId>(std::stoul(cols[4])), static_cast<VertexId>(std::stoul(cols[5])),
                     2 * lang + (cols[3] == "<-")};
        s.word = alpha.parse_colored_word(cols[6]);
        if (cols.size() > 7)
            s.names = split_names(cols[7]);
        for (std::size_t i = 0; i + 1 < s.word.size(); ++i)
            s.fresh.push_back(static_cast<VertexId>(next_id++));
        t.steps.push_back(std::move(s));
    }
    if (t.initial.empty())
        throw SchemaError("transcript lacks the initial word");
    return t;
}

}  // namespace escape::io
