#include "mathverify/baseline.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <tuple>
#include <unordered_map>

#include "mathverify/errors.hpp"
#include "mathverify/extract.hpp"

namespace mathverify {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_number(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t int_digits = 0, frac_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++int_digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++frac_digits;
    }
    if (int_digits + frac_digits == 0) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp_digits;
        if (exp_digits == 0) return false;
    }
    return i == s.size();
}

bool is_plain_integer(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

double to_double(std::string_view s) {
    return std::strtod(std::string(s).c_str(), nullptr);
}

// Accepts \infty with an optional +, - or \pm prefix.
bool parse_infinity(std::string_view s, double* out) {
    double sign = 1.0;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        if (s[0] == '-') sign = -1.0;
        s.remove_prefix(1);
        s = trim(s);
    } else if (s.substr(0, 4) == "\\pm\\") {
        s.remove_prefix(3);
        s = trim(s);
    }
    if (s == "\\infty") {
        *out = sign * std::numeric_limits<double>::infinity();
        return true;
    }
    return false;
}

bool parse_endpoint(std::string_view s, double* out) {
    s = trim(s);
    if (parse_infinity(s, out)) return true;
    if (is_number(s)) {
        *out = to_double(s);
        return true;
    }
    return false;
}

// \frac{a}{b} with integer a, b — nothing else.
bool parse_frac(std::string_view s, std::int64_t* num, std::int64_t* den) {
    constexpr std::string_view kFrac = "\\frac{";
    if (s.substr(0, kFrac.size()) != kFrac) return false;
    std::size_t close1 = s.find('}', kFrac.size());
    if (close1 == std::string_view::npos) return false;
    std::string_view a = s.substr(kFrac.size(), close1 - kFrac.size());
    if (close1 + 1 >= s.size() || s[close1 + 1] != '{' || s.back() != '}') return false;
    std::string_view b = s.substr(close1 + 2, s.size() - close1 - 3);
    if (!is_plain_integer(a) || !is_plain_integer(b)) return false;
    errno = 0;
    std::int64_t an = std::strtoll(std::string(a).c_str(), nullptr, 10);
    std::int64_t bn = std::strtoll(std::string(b).c_str(), nullptr, 10);
    if (errno == ERANGE || bn == 0) return false;
    *num = an;
    *den = bn;
    return true;
}

}  // namespace

ParsedAnswer parse_literal(std::string_view answer, const BaselineConfig& cfg) {
    ParsedAnswer out;
    out.raw = std::string(answer);

    std::string_view s = trim(answer);
    if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
        s = trim(s.substr(1, s.size() - 2));
    }
    if (cfg.strip_percent && !s.empty() && s.back() == '%') {
        s = trim(s.substr(0, s.size() - 1));
    }
    if (s.empty()) return out;

    if (std::int64_t num, den; parse_frac(s, &num, &den)) {
        out.kind = ParsedAnswer::Kind::Rational;
        out.num = num;
        out.den = den;
        return out;
    }

    if (is_number(s)) {
        if (is_plain_integer(s)) {
            errno = 0;
            std::int64_t v = std::strtoll(std::string(s).c_str(), nullptr, 10);
            if (errno != ERANGE) {
                out.kind = ParsedAnswer::Kind::Rational;
                out.num = v;
                out.den = 1;
                return out;
            }
        }
        out.kind = ParsedAnswer::Kind::Float;
        out.value = to_double(s);
        return out;
    }

    if (s.size() >= 3 && (s.front() == '(' || s.front() == '[') &&
        (s.back() == ')' || s.back() == ']')) {
        std::string_view body = s.substr(1, s.size() - 2);
        std::size_t comma = body.find(',');
        if (comma != std::string_view::npos && body.find(',', comma + 1) == std::string_view::npos) {
            double lo, hi;
            if (parse_endpoint(body.substr(0, comma), &lo) &&
                parse_endpoint(body.substr(comma + 1), &hi) && lo <= hi) {
                out.kind = ParsedAnswer::Kind::Interval;
                out.lo = lo;
                out.hi = hi;
                out.lo_open = s.front() == '(';
                out.hi_open = s.back() == ')';
                return out;
            }
        }
    }

    return out;  // Unparseable
}

namespace {

bool close_enough(double a, double b, const BaselineConfig& cfg) {
    if (a == b) return true;  // covers matching infinities
    if (std::isinf(a) || std::isinf(b)) return false;
    double d = std::fabs(a - b);
    return d <= cfg.abs_tol || d <= cfg.rel_tol * std::max(std::fabs(a), std::fabs(b));
}

bool is_numeric(const ParsedAnswer& p) {
    return p.kind == ParsedAnswer::Kind::Rational || p.kind == ParsedAnswer::Kind::Float;
}

}  // namespace

Decision baseline_equivalent(std::string_view gt, std::string_view pred,
                             const BaselineConfig& cfg) {
    ParsedAnswer a = parse_literal(gt, cfg);
    ParsedAnswer b = parse_literal(pred, cfg);

    if (a.kind == ParsedAnswer::Kind::Unparseable || b.kind == ParsedAnswer::Kind::Unparseable) {
        return normalize_answer_key(gt) == normalize_answer_key(pred) ? Decision::Correct
                                                                      : Decision::Incorrect;
    }
    if (is_numeric(a) && is_numeric(b)) {
        return close_enough(a.numeric(), b.numeric(), cfg) ? Decision::Correct
                                                           : Decision::Incorrect;
    }
    if (a.kind == ParsedAnswer::Kind::Interval && b.kind == ParsedAnswer::Kind::Interval) {
        // Bracket openness ignored: characterized false positive.
        return close_enough(a.lo, b.lo, cfg) && close_enough(a.hi, b.hi, cfg)
                   ? Decision::Correct
                   : Decision::Incorrect;
    }
    return Decision::Incorrect;  // mixed kinds
}

std::vector<Verdict> baseline_verdicts(const std::vector<Question>& questions,
                                       const std::vector<Prediction>& predictions,
                                       const BaselineConfig& cfg,
                                       const ExtractionPolicy& extraction) {
    std::unordered_map<std::string, const Question*> by_id;
    for (const auto& q : questions) by_id[q.id] = &q;

    std::vector<Verdict> out;
    out.reserve(predictions.size());
    std::string unknown;
    for (const auto& p : predictions) {
        auto it = by_id.find(p.question_id);
        if (it == by_id.end()) {
            unknown += (unknown.empty() ? "" : ", ") + p.question_id;
            continue;
        }
        Verdict v;
        v.question_id = p.question_id;
        v.sample_index = p.sample_index;
        v.source = VerdictSource::Baseline;
        std::optional<std::string> answer = p.extracted_answer;
        if (!answer) answer = extract_final_answer(p.raw_response, extraction);
        if (answer && !normalize_answer_key(*answer).empty()) {
            v.answer_key = normalize_answer_key(*answer);
            v.decision = baseline_equivalent(it->second->gt_answer, *answer, cfg);
            v.votes = {v.decision};
        } else {
            v.decision = Decision::Incorrect;  // extraction failure
        }
        out.push_back(std::move(v));
    }
    if (!unknown.empty())
        throw DataJoinError("predictions reference unknown question ids: " + unknown);
    std::sort(out.begin(), out.end(), [](const Verdict& a, const Verdict& b) {
        return std::tie(a.question_id, a.sample_index) < std::tie(b.question_id, b.sample_index);
    });
    return out;
}

}  // namespace mathverify
