#include "mathverify/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "mathverify/errors.hpp"

namespace mathverify {

namespace {

constexpr const char* kCorrectiveSuffix =
    "\n\nYour previous reply did not follow the required format. "
    "Reply again using exactly the format specified above.";

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Finds a line of the form "MARKER: value" and returns the trimmed value.
std::optional<std::string> marker_value(const std::string& reply, std::string_view marker) {
    std::istringstream lines(reply);
    std::string line;
    std::optional<std::string> found;
    while (std::getline(lines, line)) {
        std::string t = trim(line);
        if (t.size() <= marker.size() || t.compare(0, marker.size(), marker) != 0) continue;
        std::size_t i = marker.size();
        while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
        if (i >= t.size() || t[i] != ':') continue;
        found = trim(std::string_view(t).substr(i + 1));
    }
    return found;
}

std::string ask(JudgeClient& client, const StageConfig& cfg, const std::string& prompt,
                double temperature, const std::string& salt) {
    ChatRequest req;
    req.model = cfg.model;
    req.messages = {{"user", prompt}};
    req.temperature = temperature;
    req.max_tokens = cfg.max_tokens;
    req.cache_salt = salt;
    return client.chat(req).text;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t seed, std::string_view question_id, std::uint32_t rep) {
    std::uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char c : question_id) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= static_cast<std::uint64_t>(rep) + 0x9e3779b97f4a7c15ULL;
    return splitmix64(h);
}

void deterministic_shuffle(std::vector<std::string>& items, std::uint64_t seed) {
    std::uint64_t state = seed;
    for (std::size_t i = items.size(); i > 1; --i) {
        state = splitmix64(state);
        std::swap(items[i - 1], items[state % i]);
    }
}

std::string stage1_prompt(const Question& q, const PromptSet& prompts) {
    return render_template(prompts.independent, {{"question", q.text}});
}

std::string stage2_prompt(const Question& q, const std::string& candidate,
                          const PromptSet& prompts) {
    return render_template(prompts.validate,
                           {{"question", q.text}, {"candidate", candidate}, {"gt", q.gt_answer}});
}

std::string stage3_prompt(const Question& q, const std::string& reference,
                          const std::vector<std::string>& chunk, const PromptSet& prompts) {
    std::string numbered;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        numbered += std::to_string(i + 1);
        numbered += ". ";
        numbered += chunk[i];
        if (i + 1 < chunk.size()) numbered += '\n';
    }
    return render_template(
        prompts.verify,
        {{"question", q.text}, {"gt", reference}, {"answers_numbered", numbered}});
}

CandidateAnswer independent_answer(const Question& q, const StageConfig& cfg, JudgeClient& client,
                                   const PromptSet& prompts) {
    std::string prompt = stage1_prompt(q, prompts);

    auto parse = [&](const std::string& reply) -> std::optional<CandidateAnswer> {
        auto answer = marker_value(reply, "ANSWER");
        auto clarity_str = marker_value(reply, "CLARITY");
        if (!answer || !clarity_str) return std::nullopt;
        int clarity = 0;
        try {
            std::size_t used = 0;
            clarity = std::stoi(*clarity_str, &used);
            if (used != clarity_str->size()) return std::nullopt;
        } catch (...) {
            return std::nullopt;
        }
        if (clarity < 1 || clarity > 10) return std::nullopt;
        return CandidateAnswer{q.id, *answer, clarity, reply};
    };

    std::string reply = ask(client, cfg, prompt, cfg.temp_independent, "s1");
    if (auto cand = parse(reply)) return *cand;
    reply = ask(client, cfg, prompt + kCorrectiveSuffix, cfg.temp_independent, "s1");
    if (auto cand = parse(reply)) return *cand;
    return CandidateAnswer{q.id, "", 0, reply};  // clarity 0: judge failure sentinel
}

ValidatedAnswer validate_gt(const Question& q, const CandidateAnswer& cand,
                            const StageConfig& cfg, JudgeClient& client,
                            const PromptSet& prompts) {
    if (!cfg.skip_independent) {
        if (cand.clarity == 0) return {q.id, false, "", ExclusionReason::JudgeFailure};
        if (cand.clarity <= cfg.clarity_threshold)
            return {q.id, false, "", ExclusionReason::UnclearQuestion};
    }

    std::string prompt = stage2_prompt(q, cfg.skip_independent ? "" : cand.answer, prompts);

    struct Parsed {
        bool gt_correct;
        std::string final_answer;
    };
    auto parse = [&](const std::string& reply) -> std::optional<Parsed> {
        auto verdict = marker_value(reply, "GT_VERDICT");
        if (!verdict) return std::nullopt;
        std::string v = lower(*verdict);
        if (v != "correct" && v != "incorrect") return std::nullopt;
        auto final_answer = marker_value(reply, "FINAL_ANSWER");
        if (v == "correct" && (!final_answer || final_answer->empty())) return std::nullopt;
        return Parsed{v == "correct", final_answer.value_or("")};
    };

    std::string reply = ask(client, cfg, prompt, cfg.temp_validate, "s2");
    auto parsed = parse(reply);
    if (!parsed) {
        reply = ask(client, cfg, prompt + kCorrectiveSuffix, cfg.temp_validate, "s2");
        parsed = parse(reply);
    }
    if (!parsed) return {q.id, false, "", ExclusionReason::JudgeFailure};
    if (!parsed->gt_correct) return {q.id, false, "", ExclusionReason::GTUnverifiable};
    return {q.id, true, parsed->final_answer, ExclusionReason::UnclearQuestion};
}

Decision majority_decision(const std::vector<Decision>& votes) {
    int correct = 0, incorrect = 0;
    for (Decision d : votes) {
        if (d == Decision::Correct) ++correct;
        if (d == Decision::Incorrect) ++incorrect;
    }
    if (correct + incorrect == 0) return Decision::Unknown;
    if (correct == incorrect) return Decision::Unknown;
    return correct > incorrect ? Decision::Correct : Decision::Incorrect;
}

namespace {

// Parses "N: correct|incorrect" lines covering 1..expected exactly once.
std::optional<std::vector<Decision>> parse_chunk_verdicts(const std::string& reply,
                                                          std::size_t expected) {
    std::vector<std::optional<Decision>> out(expected);
    std::istringstream lines(reply);
    std::string line;
    while (std::getline(lines, line)) {
        std::string t = trim(line);
        std::size_t i = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
        if (i == 0) continue;
        std::size_t idx = 0;
        try {
            idx = std::stoul(t.substr(0, i));
        } catch (...) {
            continue;
        }
        while (i < t.size() && (std::isspace(static_cast<unsigned char>(t[i])) || t[i] == ':' ||
                                t[i] == '.' || t[i] == ')'))
            ++i;
        std::string rest = lower(trim(std::string_view(t).substr(i)));
        Decision d;
        if (rest == "correct")
            d = Decision::Correct;
        else if (rest == "incorrect")
            d = Decision::Incorrect;
        else
            continue;
        if (idx < 1 || idx > expected) return std::nullopt;
        if (out[idx - 1] && *out[idx - 1] != d) return std::nullopt;  // contradictory
        out[idx - 1] = d;
    }
    std::vector<Decision> result;
    result.reserve(expected);
    for (const auto& d : out) {
        if (!d) return std::nullopt;  // some answer left unjudged
        result.push_back(*d);
    }
    return result;
}

}  // namespace

std::vector<Verdict> verify_predictions(const Question& q, const ValidatedAnswer& v,
                                        const std::vector<Prediction>& preds,
                                        const StageConfig& cfg, JudgeClient& client,
                                        const PromptSet& prompts) {
    if (!v.validated) throw ConfigError("verify_predictions requires a validated answer");
    for (const auto& p : preds)
        if (p.question_id != q.id)
            throw ConfigError("prediction for \"" + p.question_id +
                              "\" passed to verify_predictions of \"" + q.id + "\"");

    // Extract and normalize; empty keys count as extraction failures.
    std::vector<std::optional<std::string>> keys(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::optional<std::string> raw = preds[i].extracted_answer;
        if (!raw) raw = extract_final_answer(preds[i].raw_response, cfg.extraction);
        if (raw) {
            std::string key = normalize_answer_key(*raw);
            if (!key.empty()) keys[i] = key;
        }
    }

    std::set<std::string> unique(
        [&] {
            std::set<std::string> s;
            for (const auto& k : keys)
                if (k) s.insert(*k);
            return s;
        }());
    std::vector<std::string> base_order(unique.begin(), unique.end());

    std::map<std::string, std::vector<Decision>> votes;
    for (const auto& k : base_order) votes[k] = {};

    for (int rep = 0; rep < cfg.n_verif; ++rep) {
        std::vector<std::string> order = base_order;
        deterministic_shuffle(order, split_seed(cfg.seed, q.id, static_cast<std::uint32_t>(rep)));

        std::string salt = "rep" + std::to_string(rep);
        for (std::size_t start = 0; start < order.size(); start += cfg.n_g) {
            std::vector<std::string> chunk(
                order.begin() + static_cast<std::ptrdiff_t>(start),
                order.begin() + static_cast<std::ptrdiff_t>(
                                    std::min(start + static_cast<std::size_t>(cfg.n_g), order.size())));
            std::string prompt = stage3_prompt(q, v.final_answer, chunk, prompts);

            std::string reply = ask(client, cfg, prompt, cfg.temp_verify, salt);
            auto parsed = parse_chunk_verdicts(reply, chunk.size());
            if (!parsed) {
                reply = ask(client, cfg, prompt + kCorrectiveSuffix, cfg.temp_verify, salt);
                parsed = parse_chunk_verdicts(reply, chunk.size());
            }
            for (std::size_t i = 0; i < chunk.size(); ++i)
                votes[chunk[i]].push_back(parsed ? (*parsed)[i] : Decision::Unknown);
        }
    }

    std::vector<Verdict> out;
    out.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        Verdict verdict;
        verdict.question_id = q.id;
        verdict.sample_index = preds[i].sample_index;
        verdict.source = VerdictSource::Judge;
        if (keys[i]) {
            verdict.answer_key = keys[i];
            verdict.votes = votes[*keys[i]];
            verdict.decision = majority_decision(verdict.votes);
        } else {
            verdict.decision = Decision::Incorrect;  // extraction failure
        }
        out.push_back(std::move(verdict));
    }
    std::sort(out.begin(), out.end(),
              [](const Verdict& a, const Verdict& b) { return a.sample_index < b.sample_index; });
    return out;
}

namespace {

// Runs fn(i) for i in [0, count) on a bounded worker pool. Transport errors
// are handled inside fn; any other exception is rethrown here.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (count == 0) return;
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;

    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<ValidatedAnswer> run_validation(const std::vector<Question>& questions,
                                            const StageConfig& cfg, JudgeClient& client,
                                            const PromptSet& prompts, bool* judge_failure,
                                            std::optional<std::string>* transport_error) {
    std::vector<ValidatedAnswer> validated(questions.size());
    std::mutex mu;

    parallel_for(questions.size(), client.config().max_concurrency, [&](std::size_t i) {
        const Question& q = questions[i];
        try {
            CandidateAnswer cand{q.id, "", 10, ""};
            if (!cfg.skip_independent) cand = independent_answer(q, cfg, client, prompts);
            validated[i] = validate_gt(q, cand, cfg, client, prompts);
        } catch (const TransportError& e) {
            validated[i] = {q.id, false, "", ExclusionReason::JudgeFailure};
            std::lock_guard lock(mu);
            if (transport_error && !transport_error->has_value()) *transport_error = e.what();
        }
    });

    if (judge_failure) {
        for (const auto& v : validated)
            if (!v.validated && v.reason == ExclusionReason::JudgeFailure) *judge_failure = true;
    }
    std::sort(validated.begin(), validated.end(),
              [](const ValidatedAnswer& a, const ValidatedAnswer& b) {
                  return a.question_id < b.question_id;
              });
    return validated;
}

PipelineResult run_pipeline(const std::vector<Question>& questions,
                            const std::vector<Prediction>& predictions, const StageConfig& cfg,
                            JudgeClient& client, const PromptSet& prompts) {
    std::unordered_map<std::string, std::vector<Prediction>> by_question;
    for (const auto& p : predictions) by_question[p.question_id].push_back(p);

    // Predictions are accepted at load with unknown ids; the join here is
    // where they become errors.
    {
        std::set<std::string> known;
        for (const auto& q : questions) known.insert(q.id);
        std::string unknown;
        for (const auto& [qid, _] : by_question)
            if (!known.count(qid)) unknown += (unknown.empty() ? "" : ", ") + qid;
        if (!unknown.empty())
            throw DataJoinError("predictions reference unknown question ids: " + unknown);
    }

    PipelineResult result;
    result.validated.resize(questions.size());
    std::mutex mu;

    parallel_for(questions.size(), client.config().max_concurrency, [&](std::size_t i) {
        const Question& q = questions[i];
        try {
            CandidateAnswer cand{q.id, "", 10, ""};
            if (!cfg.skip_independent) cand = independent_answer(q, cfg, client, prompts);
            ValidatedAnswer v = validate_gt(q, cand, cfg, client, prompts);
            result.validated[i] = v;
            if (!v.validated) return;  // excluded questions contribute no verdicts
            auto it = by_question.find(q.id);
            if (it == by_question.end()) return;
            auto verdicts = verify_predictions(q, v, it->second, cfg, client, prompts);
            std::lock_guard lock(mu);
            result.verdicts.insert(result.verdicts.end(), verdicts.begin(), verdicts.end());
        } catch (const TransportError& e) {
            result.validated[i] = {q.id, false, "", ExclusionReason::JudgeFailure};
            std::lock_guard lock(mu);
            if (!result.transport_error) result.transport_error = e.what();
        }
    });

    for (const auto& v : result.validated)
        if (!v.validated && v.reason == ExclusionReason::JudgeFailure) result.judge_failure = true;

    std::sort(result.validated.begin(), result.validated.end(),
              [](const ValidatedAnswer& a, const ValidatedAnswer& b) {
                  return a.question_id < b.question_id;
              });
    std::sort(result.verdicts.begin(), result.verdicts.end(),
              [](const Verdict& a, const Verdict& b) {
                  return std::tie(a.question_id, a.sample_index) <
                         std::tie(b.question_id, b.sample_index);
              });
    return result;
}

}  // namespace mathverify
