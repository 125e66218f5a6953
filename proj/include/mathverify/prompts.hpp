#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace mathverify {

// Plain-text templates with {{placeholder}} markers. Shipped as versioned
// assets; defaults are embedded so the library works without a prompts/
// directory on disk.
struct PromptSet {
    std::string independent;  // {{question}}
    std::string validate;     // {{question}}, {{candidate}}, {{gt}}
    std::string verify;       // {{question}}, {{gt}}, {{answers_numbered}}

    // sha256 per template, recorded in the run manifest.
    std::map<std::string, std::string> digests() const;
};

PromptSet default_prompts();

// Loads independent.txt / validate.txt / verify.txt from dir; any missing
// file falls back to the embedded default.
PromptSet load_prompts(const std::filesystem::path& dir);

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values);

}  // namespace mathverify
