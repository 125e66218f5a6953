#include <doctest.h>

#include "mathverify/metrics.hpp"

#include <random>

#include "mathverify/errors.hpp"

using namespace mathverify;

namespace {

// Exhaustive oracle: fraction of k-subsets of n samples (c of them correct)
// that contain at least one correct sample.
double subset_oracle(int n, int c, int k) {
    long total = 0, hit = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        ++total;
        if (mask & ((1u << c) - 1)) ++hit;  // first c samples are the correct ones
    }
    return double(hit) / double(total);
}

}  // namespace

TEST_CASE("pass_at_k closed forms") {
    CHECK(pass_at_k(8, 4, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pass_at_k(8, 0, 4) == 0.0);
    CHECK(pass_at_k(8, 8, 3) == 1.0);
    CHECK(pass_at_k(5, 2, 3) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK_THROWS_AS((void)pass_at_k(4, 5, 1), ConfigError);
    CHECK_THROWS_AS((void)pass_at_k(4, 1, 5), ConfigError);
    CHECK_THROWS_AS((void)pass_at_k(4, -1, 1), ConfigError);
}

TEST_CASE("pass_at_k equals exhaustive subset enumeration for small n") {
    for (int n = 1; n <= 12; ++n)
        for (int c = 0; c <= n; ++c)
            for (int k = 1; k <= n; ++k)
                CHECK(pass_at_k(n, c, k) == doctest::Approx(subset_oracle(n, c, k)).epsilon(1e-12));
}

TEST_CASE("pass_at_k monotone in k and c; boundary identities") {
    for (int n = 1; n <= 20; ++n) {
        for (int c = 0; c <= n; ++c) {
            CHECK(pass_at_k(n, c, 1) == doctest::Approx(double(c) / n).epsilon(1e-12));
            CHECK(pass_at_k(n, c, n) == (c >= 1 ? 1.0 : 0.0));
            for (int k = 2; k <= n; ++k)
                CHECK(pass_at_k(n, c, k) >= pass_at_k(n, c, k - 1));
        }
        for (int k = 1; k <= n; ++k)
            for (int c = 1; c <= n; ++c)
                CHECK(pass_at_k(n, c, k) >= pass_at_k(n, c - 1, k));
    }
}

TEST_CASE("curve averages per-question values and validates k") {
    std::vector<SampleStats> stats = {{"a", 8, 8}, {"b", 8, 0}};
    auto c = curve(stats, {1});
    CHECK(c.values[0] == doctest::Approx(0.5));
    CHECK(c.n_questions == 2);

    auto mono = curve({{"a", 8, 3}}, {1, 2, 4, 8});
    for (std::size_t i = 1; i < mono.values.size(); ++i)
        CHECK(mono.values[i] >= mono.values[i - 1]);

    CHECK_THROWS_WITH_AS((void)curve({{"small", 4, 1}}, {8}), doctest::Contains("small"),
                         ConfigError);
    CHECK_THROWS_AS((void)curve({}, {1}), ConfigError);
}

TEST_CASE("default_ks lists powers of two up to n") {
    CHECK(default_ks(8) == std::vector<int>{1, 2, 4, 8});
    CHECK(default_ks(9) == std::vector<int>{1, 2, 4, 8});
    CHECK(default_ks(1) == std::vector<int>{1});
}

TEST_CASE("f1 arithmetic") {
    CHECK(f1(0.989, 0.592) == doctest::Approx(0.741).epsilon(0.0015));
    CHECK(f1(0.952, 0.986) == doctest::Approx(0.969).epsilon(0.0015));
    CHECK(f1(0.0, 0.0) == 0.0);
    CHECK(f1(1.0, 1.0) == 1.0);
}

TEST_CASE("collect_stats counts Unknown toward n only") {
    std::vector<Verdict> verdicts = {
        {"q1", 0, std::string("a"), Decision::Correct, {}, VerdictSource::Judge},
        {"q1", 1, std::string("b"), Decision::Unknown, {}, VerdictSource::Judge},
        {"q1", 2, std::string("c"), Decision::Incorrect, {}, VerdictSource::Judge},
    };
    auto stats = collect_stats(verdicts);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].n == 3);
    CHECK(stats[0].c == 1);
}

TEST_CASE("confusion joins labels by normalized answer text") {
    std::vector<Verdict> verdicts = {
        {"q1", 0, std::string("10^{-3}"), Decision::Correct, {}, VerdictSource::Judge},
        {"q1", 1, std::string("1"), Decision::Incorrect, {}, VerdictSource::Judge},
        {"q1", 2, std::string("0"), Decision::Unknown, {}, VerdictSource::Judge},
    };
    std::vector<LabeledResponse> labels = {
        {"q1", "$10^{-3}$", Label::Correct},   // normalizes onto the verdict key
        {"q1", "1", Label::Incorrect},
        {"q1", "0", Label::Correct},           // Unknown counts as Incorrect -> fn
    };
    auto report = confusion(verdicts, labels);
    CHECK(report.counts.tp == 1);
    CHECK(report.counts.tn == 1);
    CHECK(report.counts.fn == 1);
    CHECK(report.counts.fp == 0);
    CHECK(report.unknown_count == 1);
    CHECK(report.counts.total() == 3);

    labels.push_back({"q9", "nope", Label::Correct});
    CHECK_THROWS_WITH_AS((void)confusion(verdicts, labels), doctest::Contains("q9"),
                         DataJoinError);
}

TEST_CASE("confusion degenerate and perfect cases") {
    ConfusionCounts c{3, 1, 1, 5};
    CHECK(c.precision() == doctest::Approx(0.75));
    CHECK(c.recall() == doctest::Approx(0.75));
    CHECK(c.f1_score() == doctest::Approx(0.75));

    std::vector<Verdict> verdicts = {
        {"q1", 0, std::string("a"), Decision::Correct, {}, VerdictSource::Judge}};
    std::vector<LabeledResponse> labels = {{"q1", "a", Label::Correct}};
    auto report = confusion(verdicts, labels);
    CHECK(report.counts.precision() == 1.0);
    CHECK(report.counts.recall() == 1.0);
    CHECK(report.counts.f1_score() == 1.0);
}

TEST_CASE("report assembly") {
    SourceReport judge{"judge", {{1, 2}, {0.5, 0.75}, 4}, 1};
    SourceReport baseline{"baseline", {{1, 2}, {0.25, 0.5}, 4}, 0};
    std::vector<ValidatedAnswer> exclusions = {
        {"bad", false, "", ExclusionReason::UnclearQuestion},
        {"good", true, "42", ExclusionReason::UnclearQuestion},
    };
    auto j = build_report_json({judge, baseline}, exclusions);
    CHECK(j["schema"] == 1);
    CHECK(j["curves"]["judge"]["values"][1] == doctest::Approx(0.75));
    CHECK(j["unknown_counts"]["judge"] == 1);
    CHECK(j["excluded_count"] == 1);
    CHECK(j["exclusions"][0]["question_id"] == "bad");
    CHECK(j["exclusions"][0]["reason"] == "unclear_question");

    auto csv = build_report_csv({judge, baseline});
    CHECK(csv.substr(0, csv.find('\n')) == "source,k,value,n_questions");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 2 rows per source

    auto svg = render_svg_chart({judge, baseline});
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find(">judge<") != std::string::npos);
    CHECK(svg.find(">baseline<") != std::string::npos);
}

TEST_CASE("pass@1 identity over random instances") {
    std::mt19937 rng(2026);
    for (int i = 0; i < 1000; ++i) {
        int n = 1 + int(rng() % 64);
        int c = int(rng() % (n + 1));
        CHECK(pass_at_k(n, c, 1) == doctest::Approx(double(c) / n).epsilon(1e-12));
    }
}
