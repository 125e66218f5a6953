#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mathverify/types.hpp"

namespace mathverify {

struct PassAtKCurve {
    std::vector<int> ks;
    std::vector<double> values;  // mean over questions, non-decreasing in k
    int n_questions = 0;
};

struct ConfusionCounts {
    long tp = 0, fp = 0, fn = 0, tn = 0;
    double precision() const { return tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp); }
    double recall() const { return tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn); }
    double f1_score() const;
    long total() const { return tp + fp + fn + tn; }
};

struct MetaEvalReport {
    ConfusionCounts counts;
    long unknown_count = 0;  // Unknown verdicts joined (counted as Incorrect)
    std::map<std::string, ConfusionCounts> per_config;
};

// 1 - C(n-c, k)/C(n, k), computed by the numerically stable product
// prod_{i=n-c+1}^{n} (1 - k/i). Returns exactly 1 when n-c < k.
// Preconditions (contract errors): 1 <= k <= n, 0 <= c <= n.
double pass_at_k(int n, int c, int k);

// Mean of per-question pass@k for each requested k. Throws ConfigError
// naming the offending question when some k exceeds its n.
PassAtKCurve curve(const std::vector<SampleStats>& stats, const std::vector<int>& ks);

// Powers of two up to max_n: 1, 2, 4, ...
std::vector<int> default_ks(int max_n);

double f1(double precision, double recall);

// Per-question (n, c) from verdicts; Unknown counts toward n, not c.
std::vector<SampleStats> collect_stats(const std::vector<Verdict>& verdicts);

// Joins labels against verdicts by (question_id, normalized answer text).
// Unknown verdicts count as Incorrect predictions. A label with no matching
// verdict raises DataJoinError listing the unmatched keys.
MetaEvalReport confusion(const std::vector<Verdict>& verdicts,
                         const std::vector<LabeledResponse>& labels);

// report.json / report.csv / SVG chart assembly.
struct SourceReport {
    std::string source;  // "judge" or "baseline"
    PassAtKCurve curve;
    long unknown_count = 0;
};

nlohmann::json build_report_json(const std::vector<SourceReport>& sources,
                                 const std::vector<ValidatedAnswer>& exclusions,
                                 const MetaEvalReport* meta = nullptr);
std::string build_report_csv(const std::vector<SourceReport>& sources);

// Self-contained line chart of pass@k vs k (log-2 x axis), one series per
// verdict source.
std::string render_svg_chart(const std::vector<SourceReport>& sources);

}  // namespace mathverify
