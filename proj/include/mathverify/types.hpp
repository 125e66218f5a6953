#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mathverify {

enum class Decision { Correct, Incorrect, Unknown };
enum class VerdictSource { Judge, Baseline };

std::string to_string(Decision d);
Decision decision_from_string(const std::string& s);
std::string to_string(VerdictSource s);
VerdictSource source_from_string(const std::string& s);

struct Question {
    std::string id;
    std::string text;
    std::string gt_answer;  // dataset annotation, verbatim
    std::string dataset = "unknown";
};

struct Prediction {
    std::string question_id;
    int sample_index = 0;
    std::string raw_response;
    std::optional<std::string> extracted_answer;
};

enum class Label { Correct, Incorrect };

struct LabeledResponse {
    std::string question_id;
    std::string answer_text;
    Label label = Label::Incorrect;
};

struct Verdict {
    std::string question_id;
    int sample_index = 0;
    std::optional<std::string> answer_key;
    Decision decision = Decision::Incorrect;
    std::vector<Decision> votes;  // one per verification repetition
    VerdictSource source = VerdictSource::Judge;
};

enum class ExclusionReason { UnclearQuestion, GTUnverifiable, JudgeFailure };

std::string to_string(ExclusionReason r);
ExclusionReason exclusion_from_string(const std::string& s);

// Outcome of the validation stages for one question: either a verified
// reference answer or an exclusion with reason.
struct ValidatedAnswer {
    std::string question_id;
    bool validated = false;
    std::string final_answer;                                   // when validated
    ExclusionReason reason = ExclusionReason::UnclearQuestion;  // when excluded
};

// Per-question (n, c) pair feeding the pass@k estimator. Unknown decisions
// count toward n but never toward c.
struct SampleStats {
    std::string question_id;
    int n = 0;
    int c = 0;
};

}  // namespace mathverify
