#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mathverify/baseline.hpp"
#include "mathverify/metrics.hpp"
#include "mathverify/pipeline.hpp"

namespace mathverify {

struct AblationSpec {
    std::string label;
    double temp_validate = 0.0;
    double temp_verify = 0.1;
    int n_g = 8;
    int n_verif = 3;
    bool skip_independent = false;
};

StageConfig apply_spec(const StageConfig& base, const AblationSpec& spec);

struct GridRow {
    std::string label;
    AblationSpec spec;       // unused for the implicit baseline row
    bool is_baseline = false;
    bool failed = false;
    std::string error;
    ConfusionCounts counts;
    long unknown_count = 0;
};

// Runs the pipeline once per spec plus an implicit symbolic-baseline row.
// A spec that fails entirely marks its row "failed" without aborting the
// grid. Rows come back sorted by F1 ascending (failed rows last).
std::vector<GridRow> run_grid(const std::vector<Question>& questions,
                              const std::vector<Prediction>& predictions,
                              const std::vector<LabeledResponse>& labels,
                              const std::vector<AblationSpec>& specs, const StageConfig& base_cfg,
                              JudgeClient& client, const PromptSet& prompts = default_prompts(),
                              const BaselineConfig& baseline_cfg = {});

// metaeval.csv: label, temp_validate, temp_verify, n_g, n_verif, precision,
// recall, f1, unknown_count.
std::string grid_to_csv(const std::vector<GridRow>& rows);

// Minimal TOML-subset grid file: one [section] per spec, keys
// temp_validate, temp_verify, n_g, n_verif, skip_independent.
std::vector<AblationSpec> load_grid_specs(const std::filesystem::path& path);

}  // namespace mathverify
