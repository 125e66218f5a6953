#include "mathverify/metaeval.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mathverify/errors.hpp"

namespace mathverify {

StageConfig apply_spec(const StageConfig& base, const AblationSpec& spec) {
    StageConfig cfg = base;
    cfg.temp_validate = spec.temp_validate;
    cfg.temp_verify = spec.temp_verify;
    cfg.n_g = spec.n_g;
    cfg.n_verif = spec.n_verif;
    cfg.skip_independent = spec.skip_independent;
    return cfg;
}

std::vector<GridRow> run_grid(const std::vector<Question>& questions,
                              const std::vector<Prediction>& predictions,
                              const std::vector<LabeledResponse>& labels,
                              const std::vector<AblationSpec>& specs, const StageConfig& base_cfg,
                              JudgeClient& client, const PromptSet& prompts,
                              const BaselineConfig& baseline_cfg) {
    {
        std::set<std::string> seen;
        for (const auto& s : specs)
            if (!seen.insert(s.label).second)
                throw ConfigError("duplicate ablation label: " + s.label);
    }

    std::vector<GridRow> rows;

    {
        GridRow row;
        row.label = "baseline";
        row.is_baseline = true;
        auto verdicts = baseline_verdicts(questions, predictions, baseline_cfg, base_cfg.extraction);
        MetaEvalReport report = confusion(verdicts, labels);
        row.counts = report.counts;
        row.unknown_count = report.unknown_count;
        rows.push_back(std::move(row));
    }

    for (const auto& spec : specs) {
        GridRow row;
        row.label = spec.label;
        row.spec = spec;
        try {
            StageConfig cfg = apply_spec(base_cfg, spec);
            PipelineResult result = run_pipeline(questions, predictions, cfg, client, prompts);
            if (result.transport_error)
                throw TransportError(*result.transport_error);
            MetaEvalReport report = confusion(result.verdicts, labels);
            row.counts = report.counts;
            row.unknown_count = report.unknown_count;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }

    std::sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
        if (a.failed != b.failed) return !a.failed;  // failed rows last
        return a.counts.f1_score() < b.counts.f1_score();
    });
    return rows;
}

std::string grid_to_csv(const std::vector<GridRow>& rows) {
    std::ostringstream out;
    out.precision(6);
    out << "label,temp_validate,temp_verify,n_g,n_verif,precision,recall,f1,unknown_count\n";
    for (const auto& row : rows) {
        out << row.label << ',';
        if (row.is_baseline) {
            out << "--,--,--,--,";
        } else {
            out << row.spec.temp_validate << ',' << row.spec.temp_verify << ',' << row.spec.n_g
                << ',' << row.spec.n_verif << ',';
        }
        if (row.failed) {
            out << "failed,failed,failed," << 0 << '\n';
        } else {
            out << row.counts.precision() << ',' << row.counts.recall() << ','
                << row.counts.f1_score() << ',' << row.unknown_count << '\n';
        }
    }
    return out.str();
}

namespace {

std::string trim(std::string s) {
    auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

}  // namespace

std::vector<AblationSpec> load_grid_specs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grid file: " + path.string());

    std::vector<AblationSpec> specs;
    AblationSpec* current = nullptr;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            AblationSpec spec;
            spec.label = trim(t.substr(1, t.size() - 2));
            if (spec.label.empty())
                throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                  ": empty spec label");
            specs.push_back(spec);
            current = &specs.back();
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos || !current)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected [section] or key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        try {
            if (key == "temp_validate")
                current->temp_validate = std::stod(value);
            else if (key == "temp_verify")
                current->temp_verify = std::stod(value);
            else if (key == "n_g")
                current->n_g = std::stoi(value);
            else if (key == "n_verif")
                current->n_verif = std::stoi(value);
            else if (key == "skip_independent")
                current->skip_independent = (value == "true" || value == "1");
            else
                throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                  ": unknown key \"" + key + "\"");
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": invalid value for \"" + key + "\": " + value);
        }
    }
    return specs;
}

}  // namespace mathverify
