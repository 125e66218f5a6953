#include "mathverify/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mathverify/errors.hpp"
#include "mathverify/extract.hpp"

using nlohmann::json;

namespace mathverify {

double ConfusionCounts::f1_score() const { return f1(precision(), recall()); }

double pass_at_k(int n, int c, int k) {
    if (n < 1 || c < 0 || c > n || k < 1 || k > n)
        throw ConfigError("pass_at_k precondition violated: n=" + std::to_string(n) +
                          " c=" + std::to_string(c) + " k=" + std::to_string(k));
    if (n - c < k) return 1.0;
    double prod = 1.0;
    for (int i = n - c + 1; i <= n; ++i) prod *= 1.0 - double(k) / double(i);
    return 1.0 - prod;
}

PassAtKCurve curve(const std::vector<SampleStats>& stats, const std::vector<int>& ks) {
    if (stats.empty()) throw ConfigError("cannot compute a pass@k curve over zero questions");
    PassAtKCurve out;
    out.ks = ks;
    out.n_questions = static_cast<int>(stats.size());
    for (int k : ks) {
        double sum = 0.0;
        for (const auto& s : stats) {
            if (k > s.n)
                throw ConfigError("k=" + std::to_string(k) + " exceeds n=" + std::to_string(s.n) +
                                  " for question \"" + s.question_id + "\"");
            sum += pass_at_k(s.n, s.c, k);
        }
        out.values.push_back(sum / double(stats.size()));
    }
    return out;
}

std::vector<int> default_ks(int max_n) {
    std::vector<int> ks;
    for (int k = 1; k <= max_n; k *= 2) ks.push_back(k);
    return ks;
}

double f1(double precision, double recall) {
    double denom = precision + recall;
    return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

std::vector<SampleStats> collect_stats(const std::vector<Verdict>& verdicts) {
    std::map<std::string, SampleStats> per_question;
    for (const auto& v : verdicts) {
        auto& s = per_question[v.question_id];
        s.question_id = v.question_id;
        s.n += 1;
        if (v.decision == Decision::Correct) s.c += 1;  // Unknown never counts toward c
    }
    std::vector<SampleStats> out;
    out.reserve(per_question.size());
    for (auto& [_, s] : per_question) out.push_back(s);
    return out;
}

MetaEvalReport confusion(const std::vector<Verdict>& verdicts,
                         const std::vector<LabeledResponse>& labels) {
    // One decision per (question_id, answer key); all verdicts sharing a key
    // carry the same decision.
    std::map<std::pair<std::string, std::string>, Decision> decisions;
    for (const auto& v : verdicts) {
        if (!v.answer_key) continue;
        decisions[{v.question_id, normalize_answer_key(*v.answer_key)}] = v.decision;
    }

    MetaEvalReport report;
    std::vector<std::string> unmatched;
    for (const auto& label : labels) {
        auto it = decisions.find({label.question_id, normalize_answer_key(label.answer_text)});
        if (it == decisions.end()) {
            unmatched.push_back(label.question_id + "/" + label.answer_text);
            continue;
        }
        if (it->second == Decision::Unknown) ++report.unknown_count;
        bool predicted_correct = it->second == Decision::Correct;
        bool labeled_correct = label.label == Label::Correct;
        if (predicted_correct && labeled_correct)
            ++report.counts.tp;
        else if (predicted_correct && !labeled_correct)
            ++report.counts.fp;
        else if (!predicted_correct && labeled_correct)
            ++report.counts.fn;
        else
            ++report.counts.tn;
    }
    if (!unmatched.empty()) {
        std::string msg = "labels with no matching verdict:";
        for (const auto& key : unmatched) msg += " " + key;
        throw DataJoinError(msg);
    }
    return report;
}

namespace {

json curve_to_json(const PassAtKCurve& c) {
    return {{"ks", c.ks}, {"values", c.values}, {"n_questions", c.n_questions}};
}

json confusion_to_json(const ConfusionCounts& c) {
    return {{"tp", c.tp},
            {"fp", c.fp},
            {"fn", c.fn},
            {"tn", c.tn},
            {"precision", c.precision()},
            {"recall", c.recall()},
            {"f1", c.f1_score()}};
}

}  // namespace

nlohmann::json build_report_json(const std::vector<SourceReport>& sources,
                                 const std::vector<ValidatedAnswer>& exclusions,
                                 const MetaEvalReport* meta) {
    json j;
    j["schema"] = 1;
    json curves = json::object();
    json unknowns = json::object();
    for (const auto& s : sources) {
        curves[s.source] = curve_to_json(s.curve);
        unknowns[s.source] = s.unknown_count;
    }
    j["curves"] = curves;
    j["unknown_counts"] = unknowns;

    json excl = json::array();
    for (const auto& v : exclusions)
        if (!v.validated)
            excl.push_back({{"question_id", v.question_id}, {"reason", to_string(v.reason)}});
    j["exclusions"] = excl;
    j["excluded_count"] = excl.size();

    if (meta) {
        json m = confusion_to_json(meta->counts);
        m["unknown_count"] = meta->unknown_count;
        if (!meta->per_config.empty()) {
            json per = json::object();
            for (const auto& [label, counts] : meta->per_config)
                per[label] = confusion_to_json(counts);
            m["per_config"] = per;
        }
        j["meta_eval"] = m;
    }
    return j;
}

std::string build_report_csv(const std::vector<SourceReport>& sources) {
    std::ostringstream out;
    out << "source,k,value,n_questions\n";
    out.precision(12);
    for (const auto& s : sources)
        for (std::size_t i = 0; i < s.curve.ks.size(); ++i)
            out << s.source << ',' << s.curve.ks[i] << ',' << s.curve.values[i] << ','
                << s.curve.n_questions << '\n';
    return out.str();
}

std::string render_svg_chart(const std::vector<SourceReport>& sources) {
    constexpr int width = 640, height = 420;
    constexpr int ml = 60, mr = 20, mt = 30, mb = 50;
    const double plot_w = width - ml - mr, plot_h = height - mt - mb;

    int max_k = 1;
    for (const auto& s : sources)
        for (int k : s.curve.ks) max_k = std::max(max_k, k);
    double max_log = std::log2(double(max_k));
    if (max_log <= 0) max_log = 1;

    auto x_of = [&](int k) { return ml + std::log2(double(k)) / max_log * plot_w; };
    auto y_of = [&](double v) { return mt + (1.0 - v) * plot_h; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // Axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w
        << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
    for (double v = 0.0; v <= 1.001; v += 0.25) {
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << y_of(v) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << v << "</text>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << y_of(v) << "\" x2=\"" << ml + plot_w
            << "\" y2=\"" << y_of(v) << "\" stroke=\"#dddddd\"/>\n";
    }
    for (int k = 1; k <= max_k; k *= 2) {
        svg << "<text x=\"" << x_of(k) << "\" y=\"" << mt + plot_h + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << k << "</text>\n";
    }
    svg << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">k</text>\n";
    svg << "<text x=\"16\" y=\"" << mt + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << mt + plot_h / 2 << ")\">pass@k</text>\n";

    int ci = 0;
    for (const auto& s : sources) {
        const char* color = colors[ci % 5];
        std::ostringstream points;
        for (std::size_t i = 0; i < s.curve.ks.size(); ++i)
            points << x_of(s.curve.ks[i]) << ',' << y_of(s.curve.values[i]) << ' ';
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << points.str() << "\"/>\n";
        for (std::size_t i = 0; i < s.curve.ks.size(); ++i)
            svg << "<circle cx=\"" << x_of(s.curve.ks[i]) << "\" cy=\"" << y_of(s.curve.values[i])
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * ci << "\" fill=\"" << color
            << "\" font-size=\"12\">" << s.source << "</text>\n";
        ++ci;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace mathverify
