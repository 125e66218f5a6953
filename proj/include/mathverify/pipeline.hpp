#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mathverify/extract.hpp"
#include "mathverify/judge_client.hpp"
#include "mathverify/prompts.hpp"
#include "mathverify/types.hpp"

namespace mathverify {

struct StageConfig {
    double temp_independent = 0.0;
    double temp_validate = 0.0;
    double temp_verify = 0.1;
    int n_g = 8;       // answers presented per verification call
    int n_verif = 3;   // verification repetitions (odd recommended; even can tie)
    int clarity_threshold = 3;  // clarity <= threshold excludes the question
    std::uint64_t seed = 0;
    bool skip_independent = false;  // single-stage validation ablation
    std::string model = "judge";
    int max_tokens = 2048;
    ExtractionPolicy extraction{};
};

struct CandidateAnswer {
    std::string question_id;
    std::string answer;
    int clarity = 0;  // 0 is the sentinel for a malformed-after-retry reply
    std::string raw_reply;
};

// Deterministic seed splitting: FNV-1a over the question id folded with the
// run seed and the repetition index, finished with a splitmix64 round. Runs
// are reproducible and independent of question processing order.
std::uint64_t split_seed(std::uint64_t seed, std::string_view question_id, std::uint32_t rep);

// Fisher-Yates driven by a splitmix64 stream; identical layout on every
// platform for a given seed.
void deterministic_shuffle(std::vector<std::string>& items, std::uint64_t seed);

// Prompt builders, exposed so tests can assert the stage-1 prompt never
// contains the dataset answer.
std::string stage1_prompt(const Question& q, const PromptSet& prompts);
std::string stage2_prompt(const Question& q, const std::string& candidate,
                          const PromptSet& prompts);
std::string stage3_prompt(const Question& q, const std::string& reference,
                          const std::vector<std::string>& chunk, const PromptSet& prompts);

CandidateAnswer independent_answer(const Question& q, const StageConfig& cfg, JudgeClient& client,
                                   const PromptSet& prompts = default_prompts());

ValidatedAnswer validate_gt(const Question& q, const CandidateAnswer& cand,
                            const StageConfig& cfg, JudgeClient& client,
                            const PromptSet& prompts = default_prompts());

std::vector<Verdict> verify_predictions(const Question& q, const ValidatedAnswer& v,
                                        const std::vector<Prediction>& preds,
                                        const StageConfig& cfg, JudgeClient& client,
                                        const PromptSet& prompts = default_prompts());

// Majority of non-Unknown votes; ties and all-Unknown give Unknown.
Decision majority_decision(const std::vector<Decision>& votes);

struct PipelineResult {
    std::vector<ValidatedAnswer> validated;
    std::vector<Verdict> verdicts;  // sorted by (question_id, sample_index)
    bool judge_failure = false;
    std::optional<std::string> transport_error;  // first transport failure, if any
};

PipelineResult run_pipeline(const std::vector<Question>& questions,
                            const std::vector<Prediction>& predictions, const StageConfig& cfg,
                            JudgeClient& client, const PromptSet& prompts = default_prompts());

// Stage 1+2 only: validation without judging predictions.
std::vector<ValidatedAnswer> run_validation(const std::vector<Question>& questions,
                                            const StageConfig& cfg, JudgeClient& client,
                                            const PromptSet& prompts = default_prompts(),
                                            bool* judge_failure = nullptr,
                                            std::optional<std::string>* transport_error = nullptr);

}  // namespace mathverify
