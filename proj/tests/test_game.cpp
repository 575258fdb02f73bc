#include <gtest/gtest.h>

#include <random>

#include "escape/game.hpp"

using namespace escape;

namespace
{

TilingInstance gray_black() { return TilingInstance({"gray", "black"}); }

struct Fixture
{
    TilingInstance inst = gray_black();
    ReductionOutput red = reduce(inst);
    Arena arena{GameConfig::from(red)};
};

std::size_t step_of(const PlayTranscript& t, const Arena& arena, const std::string& constraint)
{
    for (const auto& s : t.steps)
        if (arena.describe(s.request) == constraint)
            return s.step;
    return 0;
}

}  // namespace

TEST(Config, Validation)
{
    auto red = reduce(gray_black());
    auto cfg = GameConfig::from(red);
    cfg.step_budget = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = GameConfig::from(red, 10, 0);
    EXPECT_THROW(Arena{cfg}, std::invalid_argument);
    cfg = GameConfig::from(red);
    cfg.q0 = reduce(TilingInstance({"gray", "black", "white"})).q0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Arena, PunishingLanguagesAndNames)
{
    Fixture f;
    EXPECT_EQ(f.arena.language_count(), 19u);
    EXPECT_EQ(f.arena.punishing().size(), 4u);
    EXPECT_EQ(f.arena.require("good15"), 14u);
    EXPECT_EQ(f.arena.describe(Request{0, 1, 29}), "good15<-");
    EXPECT_THROW(f.arena.require("good0"), std::out_of_range);
    const auto& words = f.arena.head_words(2 * 14 + 1);
    EXPECT_EQ(words.words.size(), 8u);
    EXPECT_FALSE(words.truncated);
}

TEST(Play, StageOneBuildsStaircase)
{
    Fixture f;
    CanonicalFugitive fug;
    auto croc = CrocodileStrategy::from_good(f.arena, strategies::start());
    std::size_t phases_checked = 0;
    PlayHooks hooks;
    hooks.on_phase_end = [&](const Structure& d, const PhaseRecord& p) {
        EXPECT_TRUE(f.arena.requests_for(p.language, d).empty()) << "phase " << p.index;
        ++phases_checked;
    };
    auto t = play(f.arena, fug, croc, hooks);
    EXPECT_EQ(t.outcome, Outcome::Quiescent) << t.detail;
    EXPECT_EQ(phases_checked, croc.sequence.size());
    auto iso = find_isomorphism_mod_shades(t.final, build_P(f.inst, 1));
    ASSERT_TRUE(iso);
    std::string why;
    EXPECT_TRUE(equal_by_names(t.final, build_P(f.inst, 1), &why)) << why;
    auto rep = monitor_principles(f.arena, t);
    EXPECT_TRUE(rep.clean());
    // ready once a has both alpha edges
    auto alpha_done = step_of(t, f.arena, "good2->");
    ASSERT_GT(alpha_done, 0u);
    for (const auto& st : rep.status)
        if (st.step >= alpha_done) {
            EXPECT_TRUE(st.p2_ready) << "step " << st.step << ": " << st.why_not;
        }
    EXPECT_FALSE(fug.last_alternatives().empty());
}

TEST(Play, StageKBuildsStaircaseK)
{
    Fixture f;
    for (int k = 1; k <= 3; ++k) {
        CanonicalFugitive fug;
        auto t = play(f.arena, fug, CrocodileStrategy::from_good(f.arena, strategies::stage(k)));
        ASSERT_EQ(t.outcome, Outcome::Quiescent) << t.detail;
        EXPECT_TRUE(isomorphic_mod_shades(t.final, build_P(f.inst, k))) << "k=" << k;
    }
}

TEST(Play, ReplayReproducesPosition)
{
    Fixture f;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RandomFugitive fug(seed);
        auto croc = CrocodileStrategy::from_good(f.arena, strategies::stage(2));
        croc.order = RequestOrder::Random;
        croc.seed = seed;
        auto t = play(f.arena, fug, croc);
        auto d = replay(f.arena, t);
        EXPECT_EQ(d.hash(), t.final_hash);
        EXPECT_EQ(d, t.final);

        RandomFugitive again(seed);
        auto u = play(f.arena, again, croc);
        ASSERT_EQ(u.steps.size(), t.steps.size());
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            EXPECT_EQ(u.steps[i].request, t.steps[i].request);
            EXPECT_EQ(u.steps[i].word, t.steps[i].word);
        }
        EXPECT_EQ(u.final_hash, t.final_hash);
        EXPECT_EQ(u.outcome, t.outcome);
    }
}

TEST(Play, ReplayRejectsTamperedTranscript)
{
    Fixture f;
    CanonicalFugitive fug;
    auto t = play(f.arena, fug, CrocodileStrategy::from_good(f.arena, strategies::start()));
    ASSERT_GT(t.steps.size(), 3u);
    auto bad = t;
    bad.steps[2].word = bad.steps[1].word;
    EXPECT_ANY_THROW(replay(f.arena, bad));
    bad = t;
    bad.initial = f.arena.alphabet().parse_colored_word("G:omega");
    EXPECT_THROW(replay(f.arena, bad), IllegalWord);
}

TEST(Play, PositionOnlyGrows)
{
    using strategies::operator+;
    Fixture f;
    RandomFugitive fug(9);
    auto croc = CrocodileStrategy::from_good(f.arena, strategies::stage(2) + strategies::layer(2));
    std::size_t vertices = 0, edges = 0;
    PlayHooks hooks;
    hooks.on_step = [&](const Structure& d, const StepRecord& s) {
        EXPECT_GE(d.vertex_count(), vertices);
        EXPECT_GT(d.edge_count(), edges) << "step " << s.step;
        EXPECT_EQ(d.vertex_count(), vertices ? vertices + s.fresh.size() : d.vertex_count());
        vertices = d.vertex_count();
        edges = d.edge_count();
    };
    play(f.arena, fug, croc, hooks);
    EXPECT_GT(edges, 0u);
}

TEST(Play, BudgetExhausted)
{
    auto red = reduce(gray_black());
    Arena arena(GameConfig::from(red, 5));
    CanonicalFugitive fug;
    auto t = play(arena, fug, CrocodileStrategy::from_good(arena, strategies::start()));
    EXPECT_EQ(t.outcome, Outcome::BudgetExhausted);
    EXPECT_EQ(t.steps.size(), 5u);
}

TEST(Play, InitialWordMustBeInQ0)
{
    Fixture f;
    ScriptedFugitive fug(f.arena.alphabet().parse_colored_word("G:alpha^C G:omega"), {});
    EXPECT_THROW(play(f.arena, fug, CrocodileStrategy{}), IllegalWord);
    CrocodileStrategy croc;
    croc.sequence = {99};
    CanonicalFugitive canon;
    EXPECT_THROW(play(f.arena, canon, croc), std::out_of_range);
}

TEST(Principles, UglyStartViolatesPrincipleOne)
{
    Fixture f;
    auto w = f.arena.alphabet().parse_colored_word(
        "G:alpha^C G:x^C G:B_V^C:gray G:B_V^C:gray G:y^C G:omega");
    ScriptedFugitive fug(w, {});
    auto croc = CrocodileStrategy::from_good(f.arena, strategies::start());
    croc.guarded = true;
    auto t = play(f.arena, fug, croc);
    EXPECT_EQ(t.outcome, Outcome::FugitiveLost);
    EXPECT_LE(t.outcome_step, 1u);
    auto rep = monitor_principles(f.arena, t);
    ASSERT_GE(rep.count(Principle::I), 1u);
    EXPECT_EQ(rep.violations.front().step, 0u);
}

TEST(Principles, BadStartLosesAtOnce)
{
    Fixture f;
    auto w = f.arena.alphabet().parse_colored_word("G:alpha^W G:x^W G:B_V^W:gray G:$^W G:omega");
    ScriptedFugitive fug(w, {});
    auto croc = CrocodileStrategy::from_good(f.arena, strategies::start());
    croc.guarded = true;
    auto t = play(f.arena, fug, croc);
    EXPECT_EQ(t.outcome, Outcome::FugitiveLost);
    EXPECT_LE(t.outcome_step, 1u);
}

TEST(Principles, ColdRedAnswerLoses)
{
    Fixture f;
    CanonicalFugitive probe;
    auto croc = CrocodileStrategy::from_good(f.arena, strategies::start());
    auto t = play(f.arena, probe, croc);
    auto step = step_of(t, f.arena, "good2->");
    ASSERT_GT(step, 0u);

    auto cold = f.arena.alphabet().parse_colored_word("R:alpha^C");
    ScriptedFugitive fug(std::nullopt, {{step, cold}});
    croc.guarded = true;
    auto u = play(f.arena, fug, croc);
    EXPECT_EQ(u.outcome, Outcome::FugitiveLost) << u.detail;
    auto rep = monitor_principles(f.arena, u);
    ASSERT_GE(rep.count(Principle::II), 1u);
    for (const auto& v : rep.violations)
        if (v.principle == Principle::II) {
            EXPECT_EQ(v.step, step);
            break;
        }
}

TEST(Principles, TemperatureMismatch)
{
    const auto& alpha = *reduce(gray_black()).alphabet;
    Structure d;
    d.add_edge(d.a(), d.b(), alpha.parse_label("G:alpha^C"));
    d.add_edge(d.a(), d.b(), alpha.parse_label("R:omega"));
    EXPECT_FALSE(temperature_mismatch(d));
    d.add_edge(d.a(), d.b(), alpha.parse_label("R:x^C"));
    EXPECT_TRUE(temperature_mismatch(d));
    EXPECT_TRUE(obeys_temperature(alpha.parse_colored_word("G:x^C R:y^W G:omega")));
    EXPECT_FALSE(obeys_temperature(alpha.parse_colored_word("G:x^W")));
}

TEST(Principles, FixturesAreReady)
{
    auto inst = gray_black();
    for (int m = 1; m <= 3; ++m) {
        std::string why;
        EXPECT_TRUE(p2_ready(build_P(inst, m), &why)) << why;
        EXPECT_TRUE(p2_ready(build_P_dollar(inst, m), &why)) << why;
        EXPECT_TRUE(p2_ready(build_G(inst, m), &why)) << why;
    }
    auto d = build_P(inst, 1);
    d.add_edge(d.a(), d.b(), {Symbol::omega(), Color::Green});
    std::string why;
    EXPECT_FALSE(p2_ready(d, &why));
    EXPECT_FALSE(why.empty());
}

TEST(Oracle, GridCoordinates)
{
    EXPECT_EQ(grid_coordinates("v3,12"), std::make_pair(3, 12));
    EXPECT_FALSE(grid_coordinates("a'"));
    EXPECT_FALSE(grid_coordinates("v3"));
    EXPECT_FALSE(grid_coordinates("v,1"));
    EXPECT_FALSE(grid_coordinates("u17"));
    auto inst = gray_black();
    GridShading s(1);
    s.at({0, 1, Orient::H}).shade = inst.black();
    s.at({0, 0, Orient::H}).shade = inst.gray();
    auto o = shading_oracle(inst, s);
    EXPECT_EQ(o({0, 1, Orient::H}), inst.black());
    EXPECT_EQ(o({0, 0, Orient::H}), inst.gray());
    EXPECT_EQ(o({5, 5, Orient::V}), inst.gray());
    EXPECT_EQ(uniform_oracle(inst.black())({0, 0, Orient::H}), inst.black());
}

TEST(Pipeline, ShadingOracleColorsTheGrid)
{
    auto inst = gray_black();
    auto s = search_shading(inst, 2);
    ASSERT_TRUE(s);
    PipelineOptions opt;
    opt.shading = &*s;
    opt.exits = ExitScript::at(2);
    auto res = run_stage_pipeline(inst, 2, opt);
    EXPECT_TRUE(res.ok()) << res.report();
    std::string why;
    EXPECT_TRUE(equal_by_names(res.transcript.final, build_G_dollar(inst, 2, &*s), &why)) << why;
}

TEST(Pipeline, RandomRequestOrder)
{
    auto inst = gray_black();
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        PipelineOptions opt;
        opt.order = RequestOrder::Random;
        opt.seed = seed;
        auto res = run_stage_pipeline(inst, 2, opt);
        EXPECT_TRUE(res.ok()) << "seed " << seed << "\n" << res.report();
    }
}

TEST(Pipeline, ReportNamesShapes)
{
    auto res = run_stage_pipeline(gray_black(), 1);
    ASSERT_TRUE(res.ok()) << res.report();
    EXPECT_GE(res.checks.size(), 3u);
    EXPECT_TRUE(res.witness);
    EXPECT_NE(res.report().find("L_2,2"), std::string::npos);
}

TEST(Lifting, CertificateExtendsEveryStep)
{
    // Everything except the dollar continuation holds in the shaded dollar grid.
    auto inst = gray_black();
    auto red = reduce(inst);
    auto s = search_shading(inst, 1);
    ASSERT_TRUE(s);
    auto target = std::make_shared<const Structure>(build_G_dollar(inst, 1, &*s));
    auto cfg = GameConfig::from(red, 2000);
    cfg.q.erase(cfg.q.begin() + red.index_of("good15"));
    Arena arena(cfg);
    ASSERT_TRUE(satisfies(*target, arena.constraints()));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 rng(seed);
        CrocodileStrategy croc;
        croc.order = RequestOrder::Random;
        croc.seed = seed;
        for (int i = 0; i < 60; ++i)
            croc.sequence.push_back(std::uniform_int_distribution<std::size_t>(0, arena.language_count() - 1)(rng));
        LiftingFugitive fug(target);
        std::size_t checked = 0;
        PlayHooks hooks;
        hooks.on_step = [&](const Structure& d, const StepRecord&) {
            auto err = fug.certificate_error(d);
            EXPECT_FALSE(err) << *err;
            ++checked;
        };
        auto t = play(arena, fug, croc, hooks);
        EXPECT_EQ(t.outcome, Outcome::Quiescent) << t.detail;
        EXPECT_FALSE(arena.lost(t.final));
        EXPECT_TRUE(is_homomorphism(t.final, *target, fug.map()));
        EXPECT_EQ(checked, t.steps.size());
    }
}

TEST(Lifting, FaultsWithoutHeadPath)
{
    auto inst = gray_black();
    auto red = reduce(inst);
    auto s = search_shading(inst, 1);
    auto target = std::make_shared<const Structure>(build_G_dollar(inst, 1, &*s));
    Arena arena(GameConfig::from(red));
    LiftingFugitive fug(target);
    using strategies::operator+;
    auto seq = strategies::start() + strategies::layer(2) + strategies::cycle();
    auto t = play(arena, fug, CrocodileStrategy::from_good(arena, seq));
    EXPECT_EQ(t.outcome, Outcome::PolicyFault);
    EXPECT_NE(t.detail.find("good15<-"), std::string::npos);
}
