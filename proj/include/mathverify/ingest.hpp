#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mathverify/types.hpp"

namespace mathverify {

struct RunManifest {
    int schema = 1;
    std::string run_id;
    nlohmann::json config_snapshot = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::map<std::string, std::string> input_digests;   // path -> sha256
    std::map<std::string, std::string> prompt_digests;  // template name -> sha256
    std::string started_at;
    std::string finished_at;
};

std::vector<Question> load_questions(const std::filesystem::path& path);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
std::vector<LabeledResponse> load_labels(const std::filesystem::path& path);
std::vector<Verdict> load_verdicts(const std::filesystem::path& path);
std::vector<ValidatedAnswer> load_validated_answers(const std::filesystem::path& path);

// Atomic write: temp file in the same directory, then rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string verdicts_to_jsonl(const std::vector<Verdict>& verdicts);
std::string validated_answers_to_jsonl(const std::vector<ValidatedAnswer>& validated);

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::filesystem::path& path);

// Recomputes digests of the manifest's input files and throws ConfigError on
// any mismatch.
void verify_manifest_digests(const RunManifest& m);

// Writes verdicts.jsonl, report.json, report.csv and manifest.json into
// out_dir. Refuses to overwrite an existing run (manifest.json present)
// unless force is set. Verdicts are sorted by (question_id, sample_index)
// before writing, so identical inputs yield byte-identical output.
void write_results(const RunManifest& run, std::vector<Verdict> verdicts,
                   const nlohmann::json& report_json, const std::string& report_csv,
                   const std::filesystem::path& out_dir, bool force = false);

std::string iso8601_now();

}  // namespace mathverify
