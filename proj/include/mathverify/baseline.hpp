#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mathverify/extract.hpp"
#include "mathverify/types.hpp"

namespace mathverify {

// A deliberately narrow literal parser: it recognizes only signed
// integers/decimals, e-notation, \frac{a}{b} with integer parts, optional
// trailing %, and numeric/infinite intervals. Everything else is
// Unparseable. The narrowness characterizes the rule-based comparison arm;
// it is not a defect to fix.
struct ParsedAnswer {
    enum class Kind { Rational, Float, Interval, Unparseable };
    Kind kind = Kind::Unparseable;

    // Rational (exact) — denominator nonzero.
    std::int64_t num = 0;
    std::int64_t den = 1;

    // Float
    double value = 0.0;

    // Interval — lo <= hi, +/-infinity allowed.
    double lo = 0.0, hi = 0.0;
    bool lo_open = false, hi_open = false;

    std::string raw;

    double numeric() const {
        return kind == Kind::Rational ? static_cast<double>(num) / static_cast<double>(den)
                                      : value;
    }
};

struct BaselineConfig {
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    bool strip_percent = true;
};

// Total: never fails, Unparseable is a value.
ParsedAnswer parse_literal(std::string_view answer, const BaselineConfig& cfg = {});

// Numeric vs numeric: tolerance comparison. Interval vs interval: endpoint
// tolerance comparison with bracket openness IGNORED (documented
// false-positive characterization). Either Unparseable: exact comparison of
// normalized strings. Mixed kinds: Incorrect.
Decision baseline_equivalent(std::string_view gt, std::string_view pred,
                             const BaselineConfig& cfg = {});

// Judges every prediction against the dataset GT of its question. Extraction
// failures are Incorrect. Throws DataJoinError for predictions whose
// question id is unknown.
std::vector<Verdict> baseline_verdicts(const std::vector<Question>& questions,
                                       const std::vector<Prediction>& predictions,
                                       const BaselineConfig& cfg = {},
                                       const ExtractionPolicy& extraction = {});

}  // namespace mathverify
