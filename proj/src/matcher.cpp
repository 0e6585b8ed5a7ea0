// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/matcher.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>

namespace hallucimc {

void MatchConfig::validate() const {
    if (partial_ratio_threshold < 0 || partial_ratio_threshold > 100)
        throw ValidationError("partial_ratio_threshold must lie in [0,100]");
}

namespace {

bool ascii_space(unsigned char c) { return std::isspace(c) != 0; }
bool ascii_punct(unsigned char c) { return std::ispunct(c) != 0; }

// UTF-8 sequences for typographic punctuation commonly found in model output.
constexpr std::array<std::string_view, 10> kUnicodePunct = {
    "‘", "’", "“", "”",  // curly quotes
    "–", "—",                      // en/em dash
    "…",                                // ellipsis
    "«", "»",                      // guillemets
    " ",                                // no-break space
};

// Number of bytes of punctuation at position i, or 0.
std::size_t punct_len_at(std::string_view s, std::size_t i, bool unicode_punct) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) return ascii_punct(c) ? 1 : 0;
    if (!unicode_punct) return 0;
    for (std::string_view mark : kUnicodePunct)
        if (s.substr(i).starts_with(mark)) return mark.size();
    return 0;
}

std::string strip_token_punct(std::string_view token, bool unicode_punct) {
    std::size_t begin = 0;
    while (begin < token.size()) {
        const std::size_t len = punct_len_at(token, begin, unicode_punct);
        if (len == 0) break;
        begin += len;
    }
    std::size_t end = token.size();
    while (end > begin) {
        // walk back one character: ASCII byte or a known multi-byte mark
        std::size_t step = 0;
        for (std::size_t k = 1; k <= 3 && k <= end - begin; ++k) {
            const std::size_t len = punct_len_at(token, end - k, unicode_punct);
            if (len == k) { step = k; break; }
        }
        if (step == 0) break;
        end -= step;
    }
    return std::string(token.substr(begin, end - begin));
}

}  // namespace

std::string normalize(std::string_view text, bool unicode_punct) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && ascii_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        std::size_t j = i;
        while (j < text.size() && !ascii_space(static_cast<unsigned char>(text[j]))) ++j;
        std::string token = strip_token_punct(text.substr(i, j - i), unicode_punct);
        if (!token.empty()) {
            for (char& c : token)
                c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (!out.empty()) out.push_back(' ');
            out += token;
        }
        i = j;
    }
    return out;
}

int partial_ratio(std::string_view needle, std::string_view haystack) {
    if (needle.size() > haystack.size()) std::swap(needle, haystack);
    if (needle.empty()) return 100;  // empty string is a substring of anything

    // Edit distance between needle and the best-matching contiguous substring
    // of haystack: standard DP with a free start (row 0 all zeros) and a free
    // end (minimum over the final row).
    const std::size_t n = needle.size();
    const std::size_t m = haystack.size();
    std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (needle[i - 1] == haystack[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    const std::size_t d = *std::min_element(prev.begin() + 1, prev.end());
    return static_cast<int>(std::lround(100.0 * static_cast<double>(n - d) / static_cast<double>(n)));
}

namespace {

// Leading choice-letter detection on the raw output: "B) ...", "b. ...",
// or a bare letter. A letter only counts when it is a valid label for the
// given choice count.
std::optional<std::string> leading_choice_letter(std::string_view output, std::size_t num_choices) {
    std::size_t i = 0;
    while (i < output.size() && ascii_space(static_cast<unsigned char>(output[i]))) ++i;
    if (i >= output.size()) return std::nullopt;
    const unsigned char c = static_cast<unsigned char>(output[i]);
    if (!std::isalpha(c)) return std::nullopt;
    const char letter = static_cast<char>(std::toupper(c));
    if (static_cast<std::size_t>(letter - 'A') >= std::min<std::size_t>(num_choices, 26)) return std::nullopt;
    std::size_t j = i + 1;
    while (j < output.size() && ascii_space(static_cast<unsigned char>(output[j]))) ++j;
    if (j >= output.size()) return std::string(1, letter);  // bare letter
    if (output[j] == ')' || output[j] == '.') return std::string(1, letter);
    return std::nullopt;
}

bool ieq(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

int match_answer(std::string_view output,
                 std::string_view truth,
                 Scenario scenario,
                 const std::vector<std::string>* choices,
                 const std::string* choice_label,
                 const MatchConfig& cfg) {
    cfg.validate();
    if (scenario == Scenario::multiple_choice && (choices == nullptr || choice_label == nullptr))
        throw ValidationError("multiple-choice grading needs choices and choice_label");

    const std::string no = normalize(output, cfg.normalize_unicode);
    const std::string nt = normalize(truth, cfg.normalize_unicode);
    if (no.empty()) return nt.empty() ? 0 : 1;  // an empty answer matches nothing
    if (!nt.empty() && partial_ratio(nt, no) >= cfg.partial_ratio_threshold) return 0;

    if (scenario == Scenario::multiple_choice) {
        const auto letter = leading_choice_letter(output, choices->size());
        if (letter.has_value() && ieq(*letter, *choice_label)) return 0;
    }
    return 1;
}

StringMatcher::StringMatcher(MatchConfig cfg) : cfg_(cfg) { cfg_.validate(); }

int StringMatcher::indicator(const AgentOutput& output, const QueryRecord& query) const {
    if (output.status != OutputStatus::ok) return 1;
    const std::vector<std::string>* choices =
        query.choices.has_value() ? &*query.choices : nullptr;
    const std::string* label = query.choice_label.has_value() ? &*query.choice_label : nullptr;
    return match_answer(output.text, query.ground_truth, query.scenario, choices, label, cfg_);
}

}  // namespace hallucimc
