// escape: command-line front end for the reduction, the game engine and the
// tiling search.

#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "escape/game.hpp"
#include "escape/io.hpp"

namespace fs = std::filesystem;
using namespace escape;
using io::json;

namespace
{

enum Exit : int { Ok = 0, Usage = 1, Invalid = 2, Budget = 3, Mismatch = 4 };

struct Common
{
    std::string instance, bundle, out, format = "json";
    std::uint64_t seed = 0;
};

io::Bundle load(const Common& c)
{
    if (!c.bundle.empty())
        return io::load_bundle_or_instance(c.bundle);
    if (!c.instance.empty())
        return io::load_bundle_or_instance(c.instance);
    throw CLI::ValidationError("--instance or --bundle is required");
}

void emit(const Common& c, const std::string& name, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n')
            std::cout << '\n';
        return;
    }
    fs::create_directories(c.out);
    io::write_file((fs::path(c.out) / name).string(), text);
}

std::map<std::string, std::string> parse_params(const std::string& spec, std::string& head)
{
    std::map<std::string, std::string> out;
    auto colon = spec.find(':');
    head = spec.substr(0, colon);
    if (colon == std::string::npos)
        return out;
    std::string rest = spec.substr(colon + 1);
    std::size_t i = 0;
    while (i <= rest.size()) {
        auto j = rest.find(',', i);
        auto item = rest.substr(i, j == std::string::npos ? std::string::npos : j - i);
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("expected key=value in '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
        if (j == std::string::npos)
            break;
        i = j + 1;
    }
    return out;
}

/// "S_start", "S_k:3+S_layer:3", "1,2,15", "bad0", mixed with '+'.
std::vector<std::size_t> parse_strategy(const Arena& arena, const std::string& spec)
{
    std::vector<std::size_t> out;
    std::size_t i = 0;
    while (i <= spec.size()) {
        auto j = spec.find('+', i);
        auto part = spec.substr(i, j == std::string::npos ? std::string::npos : j - i);
        if (auto named = strategies::by_name(part)) {
            auto s = CrocodileStrategy::from_good(arena, *named);
            out.insert(out.end(), s.sequence.begin(), s.sequence.end());
        } else {
            std::size_t k = 0;
            while (k <= part.size()) {
                auto c = part.find(',', k);
                auto tok = part.substr(k, c == std::string::npos ? std::string::npos : c - k);
                if (!tok.empty() && std::all_of(tok.begin(), tok.end(), ::isdigit))
                    out.push_back(arena.require("good" + tok));
                else
                    out.push_back(arena.require(tok));
                if (c == std::string::npos)
                    break;
                k = c + 1;
            }
        }
        if (j == std::string::npos)
            break;
        i = j + 1;
    }
    return out;
}

ExitScript parse_exit(const std::string& s)
{
    if (s.empty() || s == "never")
        return ExitScript::never();
    return ExitScript::at(std::stoi(s));
}

std::unique_ptr<FugitivePolicy> make_fugitive(const io::Bundle& b, const Arena& arena, const std::string& spec,
                                              ExitScript exits)
{
    std::string kind;
    auto params = parse_params(spec, kind);
    const auto& alpha = *b.reduction.alphabet;
    ShadeOracle oracle = uniform_oracle(b.instance.gray());
    if (params.count("shading"))
        oracle = shading_oracle(b.instance, io::shading_from_json(b.instance, io::read_json_file(params["shading"])));
    if (kind == "canonical")
        return std::make_unique<CanonicalFugitive>(oracle, exits);
    if (kind == "random")
        return std::make_unique<RandomFugitive>(params.count("seed") ? std::stoull(params["seed"]) : 0);
    if (kind == "lifting") {
        if (!params.count("target"))
            throw CLI::ValidationError("lifting needs target=FILE");
        auto target = std::make_shared<Structure>(io::structure_from_json(alpha, io::read_json_file(params["target"])));
        return std::make_unique<LiftingFugitive>(target);
    }
    if (kind == "scripted") {
        std::optional<ColoredWord> start;
        std::map<std::size_t, ColoredWord> answers;
        for (const auto& [key, value] : params) {
            if (key == "start") {
                const auto& l = arena.language(arena.require(value)).language;
                auto words = enumerate_colored_words(color(l, Color::Green), 1);
                if (words.words.empty())
                    throw CLI::ValidationError("language " + value + " has no word");
                start = words.words.front();
            } else if (key == "start-word") {
                start = alpha.parse_colored_word(value);
            } else if (key.rfind("step", 0) == 0) {
                answers[std::stoull(key.substr(4))] = alpha.parse_colored_word(value);
            } else if (key != "shading") {
                throw CLI::ValidationError("unknown scripted parameter '" + key + "'");
            }
        }
        return std::make_unique<ScriptedFugitive>(start, answers, oracle, exits);
    }
    throw CLI::ValidationError("unknown fugitive '" + kind + "'");
}

int exit_for(Outcome o)
{
    switch (o) {
    case Outcome::Quiescent: return Ok;
    case Outcome::FugitiveLost: return Invalid;
    case Outcome::BudgetExhausted: return Budget;
    case Outcome::PolicyFault: return Mismatch;
    }
    return Mismatch;
}

json summary(const PlayTranscript& t)
{
    json j{{"outcome", outcome_name(t.outcome)},
           {"moves", t.outcome_step},
           {"detail", t.detail},
           {"fugitive", t.fugitive},
           {"seed", t.seed},
           {"final_hash", t.final_hash},
           {"vertices", t.final.vertex_count()},
           {"edges", t.final.edge_count()}};
    if (t.lost_at)
        j["lost_at"] = *t.lost_at;
    return j;
}

void write_play_outputs(const Common& c, const Arena& arena, const PlayTranscript& t, const json& extra)
{
    const auto& alpha = arena.alphabet();
    if (c.out.empty()) {
        if (c.format == "tsv")
            std::cout << io::transcript_to_tsv(arena, t);
        else if (c.format == "dot")
            std::cout << io::to_dot(alpha, t.final);
        else
            std::cout << extra.dump(2) << "\n";
        return;
    }
    emit(c, "transcript.tsv", io::transcript_to_tsv(arena, t));
    emit(c, "final.json", io::structure_to_json(alpha, t.final).dump(2));
    emit(c, "final.dot", io::to_dot(alpha, t.final));
    emit(c, "summary.json", extra.dump(2));
    std::cout << extra.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Escape game engine for regular path query determinacy"};
    app.require_subcommand(1);
    Common c;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--instance", c.instance, "tiling instance JSON");
        sub->add_option("--bundle", c.bundle, "bundle JSON written by reduce");
        sub->add_option("--out", c.out, "output directory (stdout when absent)");
        sub->add_option("--format", c.format, "json, dot or tsv")->check(CLI::IsMember({"json", "dot", "tsv"}));
        sub->add_option("--seed", c.seed, "RNG seed");
    };

    auto* reduce_cmd = app.add_subcommand("reduce", "build the view languages from a tiling instance");
    common(reduce_cmd);

    std::string strategy = "S_start", fugitive = "canonical", exit_script, schedule = "chase", transcript_path,
                structure_path, emit_path;
    std::size_t budget = 10000, words = 1000;
    int pipeline = 0, stages = 3, k = 1;
    bool guarded = false, erase = false, keep_going = false;

    auto* play_cmd = app.add_subcommand("play", "play one game, or a staged pipeline with --pipeline");
    common(play_cmd);
    play_cmd->add_option("--strategy", strategy, "named strategy, good numbers or language names joined by '+'");
    play_cmd->add_option("--fugitive", fugitive, "canonical | scripted:start=L,stepN=WORD | lifting:target=F | random:seed=N");
    play_cmd->add_option("--exit-script", exit_script, "take the dollar exit at the k-th opportunity");
    play_cmd->add_option("--schedule", schedule, "chase | random[:seed=N]");
    play_cmd->add_option("--budget", budget, "step budget");
    play_cmd->add_option("--word-budget", words, "word enumeration budget");
    play_cmd->add_flag("--guarded", guarded, "serve punishing requests first");
    play_cmd->add_flag("--keep-going", keep_going, "continue after the fugitive loses");
    play_cmd->add_option("--pipeline", pipeline, "run the stage pipeline for this m");
    play_cmd->add_option("--stages", stages, "pipeline depth: 1, 2 or 3")->check(CLI::Range(1, 3));
    play_cmd->add_option("--shading", structure_path, "shading JSON for the canonical shade oracle");

    auto* verify_cmd = app.add_subcommand("verify", "validate a structure as a counterexample");
    common(verify_cmd);
    verify_cmd->add_option("--structure", structure_path, "structure JSON")->required();

    auto* search_cmd = app.add_subcommand("search", "search a proper shading of the k-grid");
    common(search_cmd);
    search_cmd->add_option("--k", k, "grid side")->check(CLI::PositiveNumber);
    search_cmd->add_option("--emit-counterexample", emit_path, "write the assembled structure here");

    auto* replay_cmd = app.add_subcommand("replay", "replay a transcript and compare the final hash");
    common(replay_cmd);
    replay_cmd->add_option("--transcript", transcript_path, "transcript TSV")->required();

    auto* export_cmd = app.add_subcommand("export", "render a structure");
    common(export_cmd);
    export_cmd->add_option("--structure", structure_path, "structure JSON")->required();
    export_cmd->add_flag("--erase-shades", erase, "drop shades from grid labels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Ok : Usage;
    }

    try {
        if (*reduce_cmd) {
            auto b = load(c);
            auto bundle = io::bundle_to_json(b.instance, b.reduction);
            if (c.out.empty()) {
                std::cout << (c.format == "json" ? bundle.dump(2) + "\n" : io::language_listing(b.reduction));
            } else {
                emit(c, "bundle.json", bundle.dump(2));
                emit(c, "languages.txt", io::language_listing(b.reduction));
                std::cout << io::language_listing(b.reduction);
            }
            return Ok;
        }

        if (*play_cmd) {
            auto b = load(c);
            if (pipeline > 0) {
                PipelineOptions opt;
                opt.stages = stages;
                opt.exits = parse_exit(exit_script);
                opt.step_budget = budget;
                opt.seed = c.seed;
                std::optional<GridShading> shading;
                if (!structure_path.empty()) {
                    shading = io::shading_from_json(b.instance, io::read_json_file(structure_path));
                    opt.shading = &*shading;
                }
                std::string kind;
                auto params = parse_params(schedule, kind);
                if (kind == "random") {
                    opt.order = RequestOrder::Random;
                    if (params.count("seed"))
                        opt.seed = std::stoull(params["seed"]);
                }
                auto res = run_stage_pipeline(b.instance, pipeline, opt);
                Arena arena(GameConfig::from(b.reduction, budget, words));
                auto j = summary(res.transcript);
                j["pipeline"] = {{"m", pipeline}, {"stages", stages}, {"ok", res.ok()}, {"report", res.report()}};
                write_play_outputs(c, arena, res.transcript, j);
                if (!res.ok())
                    return Mismatch;
                return Ok;
            }
            Arena arena(GameConfig::from(b.reduction, budget, words));
            CrocodileStrategy croc;
            croc.sequence = parse_strategy(arena, strategy);
            croc.guarded = guarded;
            croc.stop_on_loss = !keep_going;
            croc.seed = c.seed;
            std::string kind;
            auto params = parse_params(schedule, kind);
            if (kind == "random") {
                croc.order = RequestOrder::Random;
                if (params.count("seed"))
                    croc.seed = std::stoull(params["seed"]);
            } else if (kind != "chase") {
                throw CLI::ValidationError("unknown schedule '" + kind + "'");
            }
            std::string fspec = fugitive;
            if (!structure_path.empty() && fugitive.rfind("canonical", 0) == 0)
                fspec = "canonical:shading=" + structure_path;
            auto policy = make_fugitive(b, arena, fspec, parse_exit(exit_script));
            auto t = play(arena, *policy, croc);
            auto j = summary(t);
            j["strategy"] = strategy;
            j["schedule"] = schedule;
            write_play_outputs(c, arena, t, j);
            return exit_for(t.outcome);
        }

        if (*verify_cmd) {
            auto b = load(c);
            auto d = io::structure_from_json(*b.reduction.alphabet, io::read_json_file(structure_path));
            auto v = validate_counterexample(d, b.reduction.constraints(), b.reduction.q0);
            static const char* clauses[] = {"none", "unserved-request", "green-query-missing", "red-query-present"};
            json j{{"verdict", v.valid ? "Valid" : "Invalid"},
                   {"clause", clauses[static_cast<int>(v.clause)]},
                   {"reason", v.reason}};
            if (c.format == "json")
                std::cout << j.dump(2) << "\n";
            else
                std::cout << (v.valid ? "Valid" : "Invalid: " + v.reason) << "\n";
            return v.valid ? Ok : Invalid;
        }

        if (*search_cmd) {
            auto b = load(c);
            auto s = search_shading(b.instance, k);
            json j{{"k", k}, {"found", s.has_value()}};
            if (s) {
                j["shading"] = io::shading_to_json(b.instance, *s);
                if (!emit_path.empty()) {
                    auto a = assemble_counterexample(b.instance, *s);
                    io::write_file(emit_path, io::structure_to_json(*b.reduction.alphabet, a.structure).dump(2));
                    j["counterexample"] = {{"path", emit_path}, {"valid", a.verdict.valid}, {"reason", a.verdict.reason}};
                }
            } else {
                j["certificate"] = "exhaustive search found no shading satisfying a1, a2, b1, b2, b3";
            }
            emit(c, "search.json", j.dump(2));
            return s ? Ok : Invalid;
        }

        if (*replay_cmd) {
            auto b = load(c);
            Arena arena(GameConfig::from(b.reduction));
            std::ifstream in(transcript_path);
            if (!in)
                throw io::SchemaError("cannot open " + transcript_path);
            std::stringstream buf;
            buf << in.rdbuf();
            auto t = io::transcript_from_tsv(arena, buf.str());
            auto d = replay(arena, t);
            bool match = d.hash() == t.final_hash;
            json j{{"steps", t.steps.size()}, {"final_hash", d.hash()}, {"expected_hash", t.final_hash}, {"match", match}};
            std::cout << j.dump(2) << "\n";
            if (!c.out.empty())
                emit(c, "replayed.json", io::structure_to_json(arena.alphabet(), d).dump(2));
            return match ? Ok : Mismatch;
        }

        if (*export_cmd) {
            auto j = io::read_json_file(structure_path);
            auto alpha = io::alphabet_of(j);
            auto d = io::structure_from_json(*alpha, j);
            if (c.format == "dot")
                emit(c, "structure.dot", io::to_dot(*alpha, d, erase));
            else
                emit(c, "structure.json", io::structure_to_json(*alpha, erase ? d.erase_shades() : d).dump(2));
            return Ok;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    } catch (const io::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    }
    return Ok;
}
