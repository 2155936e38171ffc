#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "epp/ehmm.hpp"
#include "epp/errors.hpp"
#include "epp/io.hpp"
#include "epp/losses.hpp"
#include "epp/mixing.hpp"
#include "epp/oracles.hpp"
#include "epp/rand.hpp"
#include "epp/trace.hpp"

using namespace epp;

TEST_CASE("model files round-trip") {
    Rng rng(41);
    auto model = random_tabular_ehmm(rng, 4, 3);
    std::ostringstream out;
    write_ehmm(out, *model);
    std::istringstream in(out.str());
    auto parsed = parse_ehmm(in);

    CHECK(parsed->state_names() == model->state_names());
    CHECK(parsed->experts() == model->experts());
    CHECK(equivalent(*parsed, *model, 4, 1e-12));
    for (StateId q = 0; q < 4; ++q) {
        CHECK(max_abs_diff(parsed->trans(q), model->trans(q)) == 0.0);
        CHECK(max_abs_diff(parsed->prod(q), model->prod(q)) == 0.0);
    }
    CHECK(max_abs_diff(parsed->init(), model->init()) == 0.0);
}

TEST_CASE("model file diagnostics") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_ehmm(in);
    };
    const std::string good = "experts: a b\nstates: s\ninit: s 1\ntrans: s s 1\nprod: s a 1\n";
    CHECK_NOTHROW(parse(good));
    // comments and flexible whitespace are fine
    CHECK_NOTHROW(parse("experts: a b # two experts\nstates: s\ninit:\ns 1\ntrans: s s 1\n"
                        "prod: s a 0.5 s b 0.5\n"));
    CHECK_THROWS_AS(parse("bogus: x\n" + good), InvalidInputError);
    CHECK_THROWS_AS(parse("a b\n" + good), InvalidInputError);
    CHECK_THROWS_AS(parse("experts: a\nstates: s\ninit: s 1\ntrans: s s 1\n"),
                    InvalidInputError); // missing prod
    CHECK_THROWS_AS(parse("experts: a\nstates: s s\ninit: s 1\ntrans: s s 1\nprod: s a 1\n"),
                    InvalidInputError); // duplicate state
    CHECK_THROWS_AS(parse("experts: a\nstates: s\ninit: s 1\ntrans: s t 1\nprod: s a 1\n"),
                    InvalidInputError); // unknown target state
    CHECK_THROWS_AS(parse("experts: a\nstates: s\ninit: s 1\ntrans: s s 0.5\nprod: s a 1\n"),
                    InvalidInputError); // transition row sums to 0.5
    CHECK_THROWS_AS(parse("experts: a\nstates: s\ninit: s 1\ntrans: s s 1 s\nprod: s a 1\n"),
                    InvalidInputError); // dangling token
    CHECK_THROWS_AS(parse("experts: a\nstates: s\ninit: s one\ntrans: s s 1\nprod: s a 1\n"),
                    InvalidInputError); // bad number
}

TEST_CASE("classical model files parse") {
    std::istringstream in(
        "states: calm wild\n"
        "outcomes: lo hi\n"
        "init: calm 1\n"
        "trans:\n"
        "calm calm 0.9  calm wild 0.1\n"
        "wild wild 1\n"
        "emit: calm lo 1 wild lo 0.25 wild hi 0.75\n");
    HmmSpec spec = parse_hmm_spec(in);
    CHECK(spec.states == std::vector<std::string>{"calm", "wild"});
    CHECK(spec.outcomes == std::vector<std::string>{"lo", "hi"});
    CHECK(spec.init[0] == 1.0);
    CHECK(spec.trans[0][1] == 0.1);
    CHECK(spec.emit[1][1] == 0.75);
    CHECK_NOTHROW(spec.to_ehmm());

    std::istringstream bad(
        "states: s\noutcomes: a b\ninit: s 1\ntrans: s s 1\nemit: s a 0.3\n");
    CHECK_THROWS_AS(parse_hmm_spec(bad), InvalidInputError); // emission row sums to 0.3
}

TEST_CASE("prediction tables serialize byte-stably") {
    Rng rng(42);
    PredictionTable table = random_prediction_table(rng, 5, {"a", "b"}, {"x", "y"});
    std::ostringstream first;
    write_prediction_table(first, table);
    std::istringstream in(first.str());
    PredictionTable parsed = parse_prediction_table(in);
    std::ostringstream second;
    write_prediction_table(second, parsed);
    CHECK(first.str() == second.str());
    CHECK(parsed.horizon() == 5);
    for (int t = 1; t <= 5; ++t)
        for (int e = 0; e < 2; ++e)
            for (int x = 0; x < 2; ++x) CHECK(parsed.prob(t, e, x) == table.prob(t, e, x));
}

TEST_CASE("prediction table diagnostics") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_prediction_table(in);
    };
    CHECK_THROWS_AS(parse(""), InvalidInputError);
    CHECK_THROWS_AS(parse("round,expert,outcome,prob\n"), InvalidInputError);
    CHECK_THROWS_AS(parse("t,expert,outcome,prob\n"), InvalidInputError); // no rows
    const std::string header = "t,expert,outcome,prob\n";
    CHECK_NOTHROW(parse(header + "1,a,x,0.5\n1,a,y,0.5\n"));
    CHECK_THROWS_AS(parse(header + "1,a,x,0.5\n"), InvalidInputError); // y missing
    CHECK_THROWS_AS(parse(header + "1,a,x,0.5\n1,a,y,0.5\n1,a,x,0.5\n"),
                    InvalidInputError); // duplicate
    CHECK_THROWS_AS(parse(header + "1,a,x,0.7\n1,a,y,0.7\n"), InvalidInputError); // sums to 1.4
    CHECK_THROWS_AS(parse(header + "0,a,x,0.5\n0,a,y,0.5\n"), InvalidInputError); // round 0
    CHECK_THROWS_AS(parse(header + "1,a,x\n"), InvalidInputError);
    CHECK_THROWS_AS(parse(header + "1,a,x,zz\n1,a,y,0.5\n"), InvalidInputError);
    // A gap round (never mentioned) leaves cells missing.
    CHECK_THROWS_AS(parse(header + "2,a,x,0.5\n2,a,y,0.5\n"), InvalidInputError);
}

TEST_CASE("outcome files") {
    std::vector<std::string> alphabet{"0", "1", "10"};
    std::vector<int> outcomes{0, 2, 1, 1};
    std::ostringstream out;
    write_outcomes(out, outcomes, alphabet);
    std::istringstream in(out.str());
    CHECK(parse_outcomes(in, alphabet) == outcomes);

    std::istringstream inline_tokens("0 10 # trailing comment\n1 1\n");
    CHECK(parse_outcomes(inline_tokens, alphabet) == outcomes);
    std::istringstream unknown("0 2\n");
    CHECK_THROWS_AS(parse_outcomes(unknown, alphabet), InvalidInputError);
    std::istringstream empty("# nothing\n");
    CHECK_THROWS_AS(parse_outcomes(empty, alphabet), InvalidInputError);
}

TEST_CASE("partition files") {
    Partition partition({0, 1, 0, 2});
    std::ostringstream out;
    write_partition(out, partition);
    CHECK(out.str() == "0 1 0 2\n");
    std::istringstream in(out.str());
    CHECK(parse_partition(in) == partition);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_partition(empty), InvalidInputError);
    std::istringstream invalid("0 2");
    CHECK_THROWS_AS(parse_partition(invalid), InvalidInputError);
    std::istringstream junk("0 x");
    CHECK_THROWS_AS(parse_partition(junk), InvalidInputError);
}

TEST_CASE("trace CSV layout is frozen with alphabetical columns") {
    RunTrace trace;
    trace.outcome_names = {"y", "x"};
    trace.expert_names = {"b", "a"};
    TraceRow row;
    row.round = 1;
    row.outcome = 1; // "x"
    row.loss = 0.5;
    row.cum_loss = 0.5;
    row.predictive = {0.25, 0.75};
    row.weights = {0.125, 0.875};
    trace.rows.push_back(row);

    std::ostringstream out;
    write_trace_csv(out, trace);
    CHECK(out.str() ==
          "t,outcome,loss,cumloss,pred:x,pred:y,w:a,w:b\n"
          "1,x,0.5,0.5,0.75,0.25,0.875,0.125\n");
}

TEST_CASE("oracle report flags dominated and undominated rows") {
    std::vector<PartitionRow> rows;
    rows.push_back({{0, 1}, 0.5, std::log(0.25)}); // prior*like = 0.125
    rows.push_back({{0, 0}, 0.5, std::log(0.9)});  // prior*like = 0.45
    std::ostringstream out;
    write_oracle_report(out, rows, std::log(0.2), 1e-9);
    CHECK(out.str() ==
          "partition,prior,likelihood,bound_ok\n"
          "0 1,0.5,0.25,1\n"
          "0 0,0.5,0.9,0\n");
}

TEST_CASE("action files") {
    const std::string header = "t,expert,action\n";
    auto parse = [](const std::string& text, int horizon) {
        std::istringstream in(text);
        return parse_actions(in, {"a", "b"}, horizon);
    };
    auto actions = parse(header + "1,a,0.25\n1,b,0.75\n2,a,0.5\n2,b,0\n", 2);
    REQUIRE(actions.size() == 2);
    CHECK(actions[0][0] == Action{0.25});
    CHECK(actions[0][1] == Action{0.75});
    CHECK(actions[1][1] == Action{0.0});

    CHECK_THROWS_AS(parse("x,y,z\n1,a,0.5\n", 1), InvalidInputError);
    CHECK_THROWS_AS(parse(header + "1,a,0.5\n", 1), InvalidInputError); // b missing
    CHECK_THROWS_AS(parse(header + "1,a,0.5\n1,a,0.5\n1,b,0.5\n", 1), InvalidInputError);
    CHECK_THROWS_AS(parse(header + "1,c,0.5\n1,b,0.5\n", 1), InvalidInputError);
    CHECK_THROWS_AS(parse(header + "3,a,0.5\n", 2), InvalidInputError);
}

TEST_CASE("derived CSV layouts") {
    DerivedTrace scalar;
    scalar.rows.push_back({1, 0, {0.25}, 0.0625, 0.0625, 0.07});
    std::ostringstream s;
    write_derived_csv(s, scalar, {"0", "1"});
    CHECK(s.str() ==
          "t,outcome,loss,cumloss,bound,action\n"
          "1,0,0.0625,0.0625,0.07,0.25\n");

    DerivedTrace dist;
    dist.rows.push_back({1, 0, {0.75, 0.25}, 0.5, 0.5, 0.5});
    std::ostringstream d;
    write_derived_csv(d, dist, {"b", "a"});
    CHECK(d.str() ==
          "t,outcome,loss,cumloss,bound,action:a,action:b\n"
          "1,b,0.5,0.5,0.5,0.25,0.75\n");
}

TEST_CASE("sampling is reproducible by seed") {
    HmmSpec spec = slot_machine();
    Rng a(7), b(7), c(8);
    auto sa = sample_hmm(spec, 50, a);
    auto sb = sample_hmm(spec, 50, b);
    auto sc = sample_hmm(spec, 50, c);
    CHECK(sa == sb);
    CHECK(sa != sc);
    for (int x : sa) {
        CHECK(x >= 0);
        CHECK(x < static_cast<int>(spec.outcomes.size()));
    }
}
