#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace mathverify {

enum class Fallback { None, LastNumber, AnswerPhrase };

struct ExtractionPolicy {
    Fallback fallback = Fallback::None;
    // When nonzero, only the trailing max_scan_bytes of the response are
    // searched. Zero means unlimited.
    std::size_t max_scan_bytes = 0;
};

// Extracts the content of the LAST \boxed{...} region, with brace matching
// that respects nesting and ignores escaped braces (\{ \}). Surrounding
// whitespace is trimmed. If no boxed region exists, the policy fallback
// applies. An absent result means extraction failure; unbalanced braces in
// the last boxed region also yield failure, never a crash.
std::optional<std::string> extract_final_answer(std::string_view response,
                                                const ExtractionPolicy& policy = {});

// Canonical key used for uniqueness grouping: Unicode NFC, trim, collapse
// internal whitespace runs to single spaces, strip one enclosing $...$ pair.
// No mathematical rewriting.
std::string normalize_answer_key(std::string_view answer);

}  // namespace mathverify
