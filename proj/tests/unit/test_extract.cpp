#include <doctest.h>

#include "mathverify/extract.hpp"

#include <random>

using namespace mathverify;

TEST_CASE("boxed extraction basics") {
    CHECK(extract_final_answer("The answer is \\boxed{42}.", {}) == "42");
    CHECK(extract_final_answer("\\boxed{\\frac{3}{20} = 0.15}", {}) == "\\frac{3}{20} = 0.15");
    CHECK(extract_final_answer("\\boxed{1} then later \\boxed{x^2+1}", {}) == "x^2+1");
    CHECK(extract_final_answer("no box here", {}) == std::nullopt);
    CHECK(extract_final_answer("", {}) == std::nullopt);
}

TEST_CASE("boxed extraction respects nesting and escapes") {
    CHECK(extract_final_answer("\\boxed{18 \\text{ hours } 48 \\text{ minutes}}", {}) ==
          "18 \\text{ hours } 48 \\text{ minutes}");
    // Escaped braces do not affect depth.
    CHECK(extract_final_answer("\\boxed{a \\{ b}", {}) == "a \\{ b");
    // Unbalanced boxed region is an extraction failure, not a crash.
    CHECK(extract_final_answer("\\boxed{\\frac{1}{2}", {}) == std::nullopt);
    // Inner whitespace trimmed.
    CHECK(extract_final_answer("\\boxed{  7  }", {}) == "7");
}

TEST_CASE("fallbacks apply only without a boxed region") {
    ExtractionPolicy last_number{Fallback::LastNumber, 0};
    CHECK(extract_final_answer("values 3 then 4.5 then -6", last_number) == "-6");
    CHECK(extract_final_answer("scientific 2e10 done", last_number) == "2e10");
    CHECK(extract_final_answer("nothing numeric", last_number) == std::nullopt);
    // A boxed region wins over the fallback.
    CHECK(extract_final_answer("1 2 3 \\boxed{x}", last_number) == "x");

    ExtractionPolicy phrase{Fallback::AnswerPhrase, 0};
    CHECK(extract_final_answer("The Answer is 12 apples\nmore text", phrase) == "12 apples");
    CHECK(extract_final_answer("first answer is 1\nfinal answer is 2", phrase) == "2");
    CHECK(extract_final_answer("no phrase", phrase) == std::nullopt);
}

TEST_CASE("max_scan_bytes limits the trailing window") {
    std::string early = "\\boxed{1} " + std::string(100, 'x');
    ExtractionPolicy tail{Fallback::None, 50};
    CHECK(extract_final_answer(early, tail) == std::nullopt);
    ExtractionPolicy all{Fallback::None, 0};
    CHECK(extract_final_answer(early, all) == "1");
}

TEST_CASE("normalize_answer_key canonicalization") {
    CHECK(normalize_answer_key("  1000 ") == "1000");
    CHECK(normalize_answer_key("$10^{-3}$") == "10^{-3}");
    CHECK(normalize_answer_key("2:00  pm") == "2:00 pm");
    CHECK(normalize_answer_key("a\tb\n c") == "a b c");
    CHECK(normalize_answer_key("") == "");
    // NFC: e + combining acute composes to the single code point.
    CHECK(normalize_answer_key("e\xcc\x81") == "\xc3\xa9");
}

TEST_CASE("normalize_answer_key is idempotent") {
    const char* inputs[] = {"  1000 ", "$10^{-3}$", "$x$", "$$x$$", "2:00  pm", "$", "$$", "a  b"};
    for (const char* s : inputs) {
        std::string once = normalize_answer_key(s);
        CHECK(normalize_answer_key(once) == once);
    }
}

TEST_CASE("extraction round-trips a single well-formed boxed region") {
    std::mt19937 rng(7);
    const std::string alphabet = "ab {}\\12+-^_";
    for (int trial = 0; trial < 500; ++trial) {
        // Generate balanced content.
        std::string content;
        int len = int(rng() % 12);
        int depth = 0;
        for (int i = 0; i < len; ++i) {
            char c = alphabet[rng() % alphabet.size()];
            if (c == '\\') continue;  // keep escapes out of the property
            if (c == '{') ++depth;
            if (c == '}') {
                if (depth == 0) continue;
                --depth;
            }
            content += c;
        }
        content.append(depth, '}');
        std::string wrapped = "prefix \\boxed{" + content + "} suffix";
        auto got = extract_final_answer(wrapped, {});
        REQUIRE(got.has_value());
        std::string trimmed = content;
        while (!trimmed.empty() && trimmed.front() == ' ') trimmed.erase(trimmed.begin());
        while (!trimmed.empty() && trimmed.back() == ' ') trimmed.pop_back();
        CHECK(*got == trimmed);
    }
}
