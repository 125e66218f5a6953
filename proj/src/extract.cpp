#include "mathverify/extract.hpp"

#include <unicode/unorm2.h>
#include <unicode/ustring.h>

#include <algorithm>
#include <cctype>
#include <vector>

namespace mathverify {

namespace {

constexpr std::string_view kBoxed = "\\boxed{";

bool is_escaped(std::string_view s, std::size_t pos) {
    // A brace is escaped when preceded by an odd number of backslashes.
    std::size_t backslashes = 0;
    while (pos > 0 && s[pos - 1] == '\\') {
        ++backslashes;
        --pos;
    }
    return backslashes % 2 == 1;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<std::string> last_number(std::string_view s) {
    std::optional<std::string> found;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t start = i;
        std::size_t j = i;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        std::size_t digits_start = j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        bool int_digits = j > digits_start;
        bool frac_digits = false;
        if (j < s.size() && s[j] == '.') {
            std::size_t k = j + 1;
            while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
            frac_digits = k > j + 1;
            if (frac_digits) j = k;
        }
        if (!int_digits && !frac_digits) {
            ++i;
            continue;
        }
        // Optional exponent, only when followed by digits.
        if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
            std::size_t k = j + 1;
            if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
            std::size_t exp_start = k;
            while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
            if (k > exp_start) j = k;
        }
        found = std::string(s.substr(start, j - start));
        i = j;
    }
    return found;
}

std::optional<std::string> answer_phrase(std::string_view s) {
    static constexpr std::string_view kPhrase = "answer is";
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i + kPhrase.size() <= s.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < kPhrase.size(); ++j) {
            if (std::tolower(static_cast<unsigned char>(s[i + j])) != kPhrase[j]) {
                match = false;
                break;
            }
        }
        if (match) last = i + kPhrase.size();
    }
    if (!last) return std::nullopt;
    std::size_t end = s.find('\n', *last);
    if (end == std::string_view::npos) end = s.size();
    auto text = trim(s.substr(*last, end - *last));
    if (text.empty()) return std::nullopt;
    return std::string(text);
}

}  // namespace

std::optional<std::string> extract_final_answer(std::string_view response,
                                                const ExtractionPolicy& policy) {
    std::string_view view = response;
    if (policy.max_scan_bytes > 0 && view.size() > policy.max_scan_bytes)
        view = view.substr(view.size() - policy.max_scan_bytes);

    std::size_t box = view.rfind(kBoxed);
    if (box == std::string_view::npos) {
        switch (policy.fallback) {
            case Fallback::None: return std::nullopt;
            case Fallback::LastNumber: return last_number(view);
            case Fallback::AnswerPhrase: return answer_phrase(view);
        }
        return std::nullopt;
    }

    std::size_t open = box + kBoxed.size() - 1;  // the '{'
    int depth = 0;
    for (std::size_t i = open; i < view.size(); ++i) {
        char c = view[i];
        if ((c == '{' || c == '}') && is_escaped(view, i)) continue;
        if (c == '{') ++depth;
        if (c == '}') {
            --depth;
            if (depth == 0) {
                auto inner = trim(view.substr(open + 1, i - open - 1));
                return std::string(inner);
            }
        }
    }
    return std::nullopt;  // unbalanced braces
}

namespace {

std::string nfc(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFCInstance(&status);
    if (U_FAILURE(status)) return std::string(s);

    std::vector<UChar> u16(s.size() + 1);
    int32_t u16_len = 0;
    status = U_ZERO_ERROR;
    u_strFromUTF8(u16.data(), static_cast<int32_t>(u16.size()), &u16_len, s.data(),
                  static_cast<int32_t>(s.size()), &status);
    if (U_FAILURE(status)) return std::string(s);  // not valid UTF-8, leave as-is

    std::vector<UChar> out(static_cast<std::size_t>(u16_len) * 3 + 1);
    status = U_ZERO_ERROR;
    int32_t out_len = unorm2_normalize(norm, u16.data(), u16_len, out.data(),
                                       static_cast<int32_t>(out.size()), &status);
    if (U_FAILURE(status)) return std::string(s);

    std::string result(static_cast<std::size_t>(out_len) * 4 + 1, '\0');
    int32_t utf8_len = 0;
    status = U_ZERO_ERROR;
    u_strToUTF8(result.data(), static_cast<int32_t>(result.size()), &utf8_len, out.data(),
                out_len, &status);
    if (U_FAILURE(status)) return std::string(s);
    result.resize(static_cast<std::size_t>(utf8_len));
    return result;
}

}  // namespace

std::string normalize_answer_key(std::string_view answer) {
    std::string s = nfc(answer);

    // Trim and collapse whitespace runs.
    std::string collapsed;
    collapsed.reserve(s.size());
    bool in_space = true;  // leading spaces dropped
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) collapsed.push_back(' ');
            in_space = true;
        } else {
            collapsed.push_back(c);
            in_space = false;
        }
    }
    while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();

    // Strip one enclosing $...$ pair. Nested $$...$$ is left alone so the
    // operation stays idempotent.
    if (collapsed.size() >= 2 && collapsed.front() == '$' && collapsed.back() == '$') {
        auto inner = trim(std::string_view(collapsed).substr(1, collapsed.size() - 2));
        bool still_wrapped =
            inner.size() >= 2 && inner.front() == '$' && inner.back() == '$';
        if (!still_wrapped) return std::string(inner);
    }
    return collapsed;
}

}  // namespace mathverify
