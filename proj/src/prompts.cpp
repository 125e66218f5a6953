#include "mathverify/prompts.hpp"

#include <fstream>
#include <sstream>

#include "mathverify/digest.hpp"
#include "mathverify/errors.hpp"

namespace mathverify {

namespace {

constexpr const char* kIndependent = R"(You are given a mathematical problem. Solve it yourself, without any external reference.

QUESTION:
{{question}}

Reply with exactly two lines and nothing else:
ANSWER: <your final answer>
CLARITY: <an integer 1-10 rating how clear and well-posed the question is; 1 means contradictory or underspecified, 10 means perfectly clear>
)";

constexpr const char* kValidate = R"(A mathematical question has two candidate reference answers: one produced by solving the question independently, and one taken from the dataset annotation. Decide whether the dataset answer is a correct answer to the question, and state the final reference answer that should be used for grading.

QUESTION:
{{question}}

INDEPENDENT ANSWER:
{{candidate}}

DATASET ANSWER:
{{gt}}

Reply with exactly two lines and nothing else:
GT_VERDICT: <correct or incorrect>
FINAL_ANSWER: <the reference answer to grade against>
)";

constexpr const char* kVerify = R"(Decide for each candidate answer whether it is mathematically equivalent to the reference answer for this question. Accept differences of representation, notation, units, or reasonable rounding when the value is the same; reject answers that are numerically or mathematically different or that violate an explicit formatting requirement in the question.

QUESTION:
{{question}}

REFERENCE ANSWER:
{{gt}}

CANDIDATE ANSWERS:
{{answers_numbered}}

Reply with exactly one line per candidate, in the form:
<number>: <correct or incorrect>
)";

std::string read_file_or(const std::filesystem::path& path, const char* fallback) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fallback;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::map<std::string, std::string> PromptSet::digests() const {
    return {{"independent", sha256_hex(independent)},
            {"validate", sha256_hex(validate)},
            {"verify", sha256_hex(verify)}};
}

PromptSet default_prompts() { return {kIndependent, kValidate, kVerify}; }

PromptSet load_prompts(const std::filesystem::path& dir) {
    return {read_file_or(dir / "independent.txt", kIndependent),
            read_file_or(dir / "validate.txt", kValidate),
            read_file_or(dir / "verify.txt", kVerify)};
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        std::string key = tmpl.substr(open + 2, close - open - 2);
        auto it = values.find(key);
        if (it == values.end())
            throw ConfigError("prompt template references unknown placeholder {{" + key + "}}");
        out += it->second;
        pos = close + 2;
    }
    return out;
}

}  // namespace mathverify
