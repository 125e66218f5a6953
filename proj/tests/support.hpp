#pragma once

// Shared helpers for scripting a fake judge endpoint in tests.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mathverify/errors.hpp"
#include "mathverify/extract.hpp"
#include "mathverify/judge_client.hpp"

namespace testsupport {

// Wraps a prompt -> assistant-text handler in the chat-completions wire
// format, with per-stage call counters (stages recognized by template
// markers).
class ScriptedTransport : public mathverify::Transport {
public:
    using Handler = std::function<std::string(const std::string& prompt)>;

    explicit ScriptedTransport(Handler handler) : handler_(std::move(handler)) {}

    std::string post(const std::string& body) override {
        nlohmann::json req = nlohmann::json::parse(body);
        std::string prompt = req.at("messages").at(0).at("content").get<std::string>();
        ++total_;
        if (prompt.find("CANDIDATE ANSWERS:") != std::string::npos)
            ++stage3_;
        else if (prompt.find("DATASET ANSWER:") != std::string::npos)
            ++stage2_;
        else
            ++stage1_;
        nlohmann::json reply = {
            {"choices", {{{"message", {{"content", handler_(prompt)}}}}}}};
        return reply.dump();
    }

    int total() const { return total_.load(); }
    int stage1() const { return stage1_.load(); }
    int stage2() const { return stage2_.load(); }
    int stage3() const { return stage3_.load(); }

private:
    Handler handler_;
    std::atomic<int> total_{0}, stage1_{0}, stage2_{0}, stage3_{0};
};

// Always throws; proves a code path performs no network activity.
class FailingTransport : public mathverify::Transport {
public:
    std::string post(const std::string&) override {
        throw mathverify::TransportError("network access attempted in a no-network test");
    }
};

// Returns the block between "HEADER:\n" and the following blank line.
inline std::string prompt_field(const std::string& prompt, const std::string& header) {
    auto pos = prompt.find(header + "\n");
    if (pos == std::string::npos) return "";
    pos += header.size() + 1;
    auto end = prompt.find("\n\n", pos);
    if (end == std::string::npos) end = prompt.size();
    return prompt.substr(pos, end - pos);
}

// Parses the numbered candidate list out of a verification prompt.
inline std::vector<std::string> prompt_candidates(const std::string& prompt) {
    std::vector<std::string> out;
    std::istringstream lines(prompt_field(prompt, "CANDIDATE ANSWERS:"));
    std::string line;
    while (std::getline(lines, line)) {
        auto dot = line.find(". ");
        if (dot == std::string::npos) continue;
        out.push_back(line.substr(dot + 2));
    }
    return out;
}

// A judge scripted from an equivalence table keyed on
// (reference answer, normalized candidate). Stage 1 answers with the
// ground truth for the question text (clarity from the clarity map,
// default 9); stage 2 confirms the dataset answer.
class SemanticJudge {
public:
    // (gt, normalized answer) -> equivalent?
    std::map<std::pair<std::string, std::string>, bool> equivalences;
    // question text -> gt answer (for stage-1 replies)
    std::map<std::string, std::string> gt_by_question;
    // question text -> clarity score (default 9)
    std::map<std::string, int> clarity_by_question;

    std::string operator()(const std::string& prompt) const {
        if (prompt.find("CANDIDATE ANSWERS:") != std::string::npos) {
            std::string ref = prompt_field(prompt, "REFERENCE ANSWER:");
            auto candidates = prompt_candidates(prompt);
            std::string reply;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                auto it = equivalences.find(
                    {ref, mathverify::normalize_answer_key(candidates[i])});
                bool ok = it != equivalences.end() && it->second;
                reply += std::to_string(i + 1) + ": " + (ok ? "correct" : "incorrect") + "\n";
            }
            return reply;
        }
        if (prompt.find("DATASET ANSWER:") != std::string::npos) {
            std::string gt = prompt_field(prompt, "DATASET ANSWER:");
            return "GT_VERDICT: correct\nFINAL_ANSWER: " + gt + "\n";
        }
        std::string question = prompt_field(prompt, "QUESTION:");
        int clarity = 9;
        if (auto it = clarity_by_question.find(question); it != clarity_by_question.end())
            clarity = it->second;
        std::string answer = "unknown";
        if (auto it = gt_by_question.find(question); it != gt_by_question.end())
            answer = it->second;
        return "ANSWER: " + answer + "\nCLARITY: " + std::to_string(clarity) + "\n";
    }
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Unique scratch directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("mathverify_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    static std::atomic<int>& counter() {
        static std::atomic<int> n{0};
        return n;
    }
};

}  // namespace testsupport
