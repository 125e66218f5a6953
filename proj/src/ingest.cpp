#include "mathverify/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mathverify/digest.hpp"
#include "mathverify/errors.hpp"

using nlohmann::json;

namespace mathverify {

namespace {

// Applies fn to each non-blank line, with 1-based line numbers in errors.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, int)>& fn) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": malformed JSON line: " + e.what());
        }
        fn(obj, lineno);
    }
}

std::string require_string(const json& obj, const char* key, const std::filesystem::path& path,
                           int lineno) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                          ": missing or non-string field \"" + key + "\"");
    return obj[key].get<std::string>();
}

}  // namespace

std::vector<Question> load_questions(const std::filesystem::path& path) {
    std::vector<Question> out;
    std::unordered_set<std::string> seen;
    for_each_jsonl(path, [&](const json& obj, int lineno) {
        Question q;
        q.id = require_string(obj, "id", path, lineno);
        q.text = require_string(obj, "question", path, lineno);
        q.gt_answer = require_string(obj, "answer", path, lineno);
        if (obj.contains("dataset")) q.dataset = obj["dataset"].get<std::string>();
        if (q.id.empty() || q.text.empty() || q.gt_answer.empty())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": id, question and answer must be non-empty");
        if (!seen.insert(q.id).second)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": duplicate question id \"" + q.id + "\"");
        out.push_back(std::move(q));
    });
    return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
    std::vector<Prediction> out;
    std::unordered_map<std::string, std::set<int>> indices;
    for_each_jsonl(path, [&](const json& obj, int lineno) {
        Prediction p;
        p.question_id = require_string(obj, "question_id", path, lineno);
        if (!obj.contains("sample_index") || !obj["sample_index"].is_number_integer())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": missing or non-integer field \"sample_index\"");
        p.sample_index = obj["sample_index"].get<int>();
        if (p.sample_index < 0)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": sample_index must be >= 0");
        p.raw_response = require_string(obj, "response", path, lineno);
        if (!indices[p.question_id].insert(p.sample_index).second)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": duplicate (question_id, sample_index) = (\"" + p.question_id +
                              "\", " + std::to_string(p.sample_index) + ")");
        out.push_back(std::move(p));
    });
    // Sample indices per question must form a contiguous 0..n-1 range.
    for (const auto& [qid, idx] : indices) {
        int expected = 0;
        for (int i : idx) {
            if (i != expected)
                throw ConfigError(path.string() + ": question \"" + qid +
                                  "\" has non-contiguous sample indices (expected " +
                                  std::to_string(expected) + ", found " + std::to_string(i) + ")");
            ++expected;
        }
    }
    return out;
}

std::vector<LabeledResponse> load_labels(const std::filesystem::path& path) {
    std::vector<LabeledResponse> out;
    for_each_jsonl(path, [&](const json& obj, int lineno) {
        LabeledResponse l;
        l.question_id = require_string(obj, "question_id", path, lineno);
        l.answer_text = require_string(obj, "answer_text", path, lineno);
        std::string label = require_string(obj, "label", path, lineno);
        if (label == "correct")
            l.label = Label::Correct;
        else if (label == "incorrect")
            l.label = Label::Incorrect;
        else
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": label must be \"correct\" or \"incorrect\"");
        if (l.answer_text.empty())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": answer_text must be non-empty");
        out.push_back(std::move(l));
    });
    return out;
}

std::vector<Verdict> load_verdicts(const std::filesystem::path& path) {
    std::vector<Verdict> out;
    for_each_jsonl(path, [&](const json& obj, int lineno) {
        Verdict v;
        v.question_id = require_string(obj, "question_id", path, lineno);
        v.sample_index = obj.at("sample_index").get<int>();
        if (obj.contains("answer") && !obj["answer"].is_null())
            v.answer_key = obj["answer"].get<std::string>();
        v.decision = decision_from_string(require_string(obj, "decision", path, lineno));
        if (obj.contains("votes"))
            for (const auto& vote : obj["votes"])
                v.votes.push_back(decision_from_string(vote.get<std::string>()));
        v.source = source_from_string(require_string(obj, "source", path, lineno));
        out.push_back(std::move(v));
    });
    return out;
}

std::vector<ValidatedAnswer> load_validated_answers(const std::filesystem::path& path) {
    std::vector<ValidatedAnswer> out;
    for_each_jsonl(path, [&](const json& obj, int lineno) {
        ValidatedAnswer v;
        v.question_id = require_string(obj, "question_id", path, lineno);
        std::string status = require_string(obj, "status", path, lineno);
        if (status == "validated") {
            v.validated = true;
            v.final_answer = require_string(obj, "final_answer", path, lineno);
        } else if (status == "excluded") {
            v.validated = false;
            v.reason = exclusion_from_string(require_string(obj, "reason", path, lineno));
        } else {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": status must be \"validated\" or \"excluded\"");
        }
        out.push_back(std::move(v));
    });
    return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ConfigError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string verdicts_to_jsonl(const std::vector<Verdict>& verdicts) {
    std::string out;
    for (const auto& v : verdicts) {
        json obj;
        obj["question_id"] = v.question_id;
        obj["sample_index"] = v.sample_index;
        if (v.answer_key)
            obj["answer"] = *v.answer_key;
        else
            obj["answer"] = nullptr;
        obj["decision"] = to_string(v.decision);
        json votes = json::array();
        for (Decision d : v.votes) votes.push_back(to_string(d));
        obj["votes"] = votes;
        obj["source"] = to_string(v.source);
        out += obj.dump();
        out += '\n';
    }
    return out;
}

std::string validated_answers_to_jsonl(const std::vector<ValidatedAnswer>& validated) {
    std::string out;
    for (const auto& v : validated) {
        json obj;
        obj["question_id"] = v.question_id;
        obj["status"] = v.validated ? "validated" : "excluded";
        if (v.validated)
            obj["final_answer"] = v.final_answer;
        else
            obj["reason"] = to_string(v.reason);
        out += obj.dump();
        out += '\n';
    }
    return out;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
    json j;
    j["schema"] = m.schema;
    j["run_id"] = m.run_id;
    j["config"] = m.config_snapshot;
    j["seed"] = m.seed;
    j["input_digests"] = m.input_digests;
    j["prompt_digests"] = m.prompt_digests;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    m.schema = j.at("schema").get<int>();
    m.run_id = j.at("run_id").get<std::string>();
    m.config_snapshot = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
    if (j.contains("prompt_digests"))
        m.prompt_digests = j.at("prompt_digests").get<std::map<std::string, std::string>>();
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest: " + path.string());
    json j;
    in >> j;
    return manifest_from_json(j);
}

void verify_manifest_digests(const RunManifest& m) {
    for (const auto& [path, digest] : m.input_digests) {
        std::string actual = sha256_file(path);
        if (actual != digest)
            throw ConfigError("digest mismatch for " + path + ": manifest has " + digest +
                              ", file has " + actual);
    }
}

void write_results(const RunManifest& run, std::vector<Verdict> verdicts,
                   const nlohmann::json& report_json, const std::string& report_csv,
                   const std::filesystem::path& out_dir, bool force) {
    if (std::filesystem::exists(out_dir / "manifest.json") && !force)
        throw ConfigError("output directory " + out_dir.string() +
                          " already holds a run; pass --force to overwrite");
    std::filesystem::create_directories(out_dir);

    std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) {
        return std::tie(a.question_id, a.sample_index) < std::tie(b.question_id, b.sample_index);
    });

    write_text_atomic(out_dir / "verdicts.jsonl", verdicts_to_jsonl(verdicts));
    write_text_atomic(out_dir / "report.json", report_json.dump(2) + "\n");
    write_text_atomic(out_dir / "report.csv", report_csv);
    write_text_atomic(out_dir / "manifest.json", manifest_to_json(run).dump(2) + "\n");
}

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace mathverify
