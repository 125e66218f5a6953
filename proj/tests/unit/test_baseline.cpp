#include <doctest.h>

#include "mathverify/baseline.hpp"

#include <fstream>
#include <random>

#include <json.hpp>

#include "mathverify/errors.hpp"

using namespace mathverify;

TEST_CASE("parse_literal recognizes the narrow grammar") {
    CHECK(parse_literal("0.001").kind == ParsedAnswer::Kind::Float);
    CHECK(parse_literal("0.001").value == doctest::Approx(0.001));
    CHECK(parse_literal("1e-3").kind == ParsedAnswer::Kind::Float);
    CHECK(parse_literal("1E+6").value == doctest::Approx(1e6));
    CHECK(parse_literal("-35").kind == ParsedAnswer::Kind::Rational);
    CHECK(parse_literal("-35").num == -35);
    CHECK(parse_literal("+2").num == 2);

    auto frac = parse_literal("\\frac{3}{20}");
    CHECK(frac.kind == ParsedAnswer::Kind::Rational);
    CHECK(frac.num == 3);
    CHECK(frac.den == 20);

    auto interval = parse_literal("(-\\infty,0]");
    CHECK(interval.kind == ParsedAnswer::Kind::Interval);
    CHECK(interval.lo == -std::numeric_limits<double>::infinity());
    CHECK(interval.hi == 0.0);
    CHECK(interval.lo_open);
    CHECK_FALSE(interval.hi_open);

    // Percent stripped, value unchanged.
    auto pct = parse_literal("25%");
    CHECK(pct.kind == ParsedAnswer::Kind::Rational);
    CHECK(pct.num == 25);

    // Balanced dollar signs stripped; a lone leading one is not.
    CHECK(parse_literal("$25$").kind == ParsedAnswer::Kind::Rational);
    CHECK(parse_literal("$57.00").kind == ParsedAnswer::Kind::Unparseable);

    // Deliberately unparseable forms.
    CHECK(parse_literal("$10^{-3}$").kind == ParsedAnswer::Kind::Unparseable);
    CHECK(parse_literal("18 \\text{ hours }").kind == ParsedAnswer::Kind::Unparseable);
    CHECK(parse_literal("np.arcsin(10/13)").kind == ParsedAnswer::Kind::Unparseable);
    CHECK(parse_literal("2:00 pm").kind == ParsedAnswer::Kind::Unparseable);
    CHECK(parse_literal("").kind == ParsedAnswer::Kind::Unparseable);
    CHECK(parse_literal("(1,2,3)").kind == ParsedAnswer::Kind::Unparseable);
    CHECK(parse_literal("(5,2)").kind == ParsedAnswer::Kind::Unparseable);  // lo > hi
}

TEST_CASE("baseline_equivalent spec examples") {
    CHECK(baseline_equivalent("1e-3", "0.001") == Decision::Correct);
    CHECK(baseline_equivalent("0.53", "0.533") == Decision::Incorrect);
    CHECK(baseline_equivalent("1128", "18 \\text{ hours } 48 \\text{ minutes}") ==
          Decision::Incorrect);
    // Characterized false positives.
    CHECK(baseline_equivalent("+2", "2") == Decision::Correct);
    CHECK(baseline_equivalent("(-\\infty,0]", "(-\\infty,0)") == Decision::Correct);
    CHECK(baseline_equivalent("2", "2:00 pm") == Decision::Incorrect);
    // Unparseable-vs-unparseable falls back to normalized string equality.
    CHECK(baseline_equivalent("x+y", " x+y ") == Decision::Correct);
    CHECK(baseline_equivalent("x+y", "y+x") == Decision::Incorrect);
    // Mixed kinds are never equivalent.
    CHECK(baseline_equivalent("(-\\infty,0]", "0") == Decision::Incorrect);
    CHECK(baseline_equivalent("7", "(0,7]") == Decision::Incorrect);
}

TEST_CASE("characterization fixture reproduces every printed verdict") {
    std::ifstream in(FIXTURES_DIR "/characterization.jsonl");
    REQUIRE(in.good());
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = nlohmann::json::parse(line);
        Decision want = row["symbolic"].get<bool>() ? Decision::Correct : Decision::Incorrect;
        CAPTURE(row["gt"].get<std::string>());
        CAPTURE(row["pred"].get<std::string>());
        CHECK(baseline_equivalent(row["gt"].get<std::string>(),
                                  row["pred"].get<std::string>()) == want);
        ++rows;
    }
    CHECK(rows >= 43);
}

TEST_CASE("equivalence is reflexive and symmetric") {
    const char* values[] = {"0.001", "1e-3", "+2",  "(-\\infty,0]", "2:00 pm",
                            "1128",  "x+y",  "25%", "\\frac{3}{20}"};
    for (const char* a : values) {
        CHECK(baseline_equivalent(a, a) == Decision::Correct);
        for (const char* b : values)
            CHECK(baseline_equivalent(a, b) == baseline_equivalent(b, a));
    }
}

TEST_CASE("tolerance monotonicity") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    for (int i = 0; i < 500; ++i) {
        double a = dist(rng), b = dist(rng);
        std::string sa = std::to_string(a), sb = std::to_string(b);
        BaselineConfig narrow{1e-9, 1e-9, true};
        BaselineConfig wide{1e-3, 1e-3, true};
        if (baseline_equivalent(sa, sb, narrow) == Decision::Correct)
            CHECK(baseline_equivalent(sa, sb, wide) == Decision::Correct);
    }
}

TEST_CASE("parser totality under fuzz") {
    std::mt19937 rng(123);
    for (int i = 0; i < 5000; ++i) {
        std::string s;
        int len = int(rng() % 40);
        for (int j = 0; j < len; ++j) s += char(rng() % 256);
        (void)parse_literal(s);
        (void)baseline_equivalent(s, "1");
    }
}

TEST_CASE("baseline_verdicts joins, extracts and sorts") {
    std::vector<Question> questions = {{"q2", "two?", "2", "t"}, {"q1", "one?", "1", "t"}};
    std::vector<Prediction> preds = {
        {"q2", 1, "so \\boxed{3}", std::nullopt},
        {"q2", 0, "so \\boxed{2}", std::nullopt},
        {"q1", 0, "no box at all", std::nullopt},
    };
    auto verdicts = baseline_verdicts(questions, preds);
    REQUIRE(verdicts.size() == 3);
    // Sorted by (question_id, sample_index).
    CHECK(verdicts[0].question_id == "q1");
    CHECK(verdicts[0].decision == Decision::Incorrect);  // extraction failure
    CHECK_FALSE(verdicts[0].answer_key.has_value());
    CHECK(verdicts[0].votes.empty());
    CHECK(verdicts[1].sample_index == 0);
    CHECK(verdicts[1].decision == Decision::Correct);
    CHECK(verdicts[2].decision == Decision::Incorrect);
    CHECK(verdicts[2].source == VerdictSource::Baseline);

    std::vector<Prediction> orphan = {{"zz", 0, "\\boxed{1}", std::nullopt}};
    CHECK_THROWS_AS((void)baseline_verdicts(questions, orphan), DataJoinError);
}
