#include "mathverify/types.hpp"

#include "mathverify/errors.hpp"

namespace mathverify {

std::string to_string(Decision d) {
    switch (d) {
        case Decision::Correct: return "correct";
        case Decision::Incorrect: return "incorrect";
        case Decision::Unknown: return "unknown";
    }
    return "unknown";
}

Decision decision_from_string(const std::string& s) {
    if (s == "correct") return Decision::Correct;
    if (s == "incorrect") return Decision::Incorrect;
    if (s == "unknown") return Decision::Unknown;
    throw ConfigError("invalid decision: " + s);
}

std::string to_string(VerdictSource s) {
    return s == VerdictSource::Judge ? "judge" : "baseline";
}

VerdictSource source_from_string(const std::string& s) {
    if (s == "judge") return VerdictSource::Judge;
    if (s == "baseline") return VerdictSource::Baseline;
    throw ConfigError("invalid verdict source: " + s);
}

std::string to_string(ExclusionReason r) {
    switch (r) {
        case ExclusionReason::UnclearQuestion: return "unclear_question";
        case ExclusionReason::GTUnverifiable: return "gt_unverifiable";
        case ExclusionReason::JudgeFailure: return "judge_failure";
    }
    return "judge_failure";
}

ExclusionReason exclusion_from_string(const std::string& s) {
    if (s == "unclear_question") return ExclusionReason::UnclearQuestion;
    if (s == "gt_unverifiable") return ExclusionReason::GTUnverifiable;
    if (s == "judge_failure") return ExclusionReason::JudgeFailure;
    throw ConfigError("invalid exclusion reason: " + s);
}

}  // namespace mathverify
