#pragma once

#include <string>
#include <vector>

namespace hdet {

// Cleaning rules for raw tweet text. All flags default on.
struct CleanConfig {
    bool lowercase = true;
    bool strip_urls = true;          // http(s)://..., www...., t.co/...
    bool strip_mentions = true;      // @user, plus stray '@'
    bool keep_hashtag_word = true;   // '#tag' -> 'tag'; false drops the tag entirely
    bool strip_emoji = true;         // emoji / pictographic codepoints
    bool collapse_whitespace = true;
};

// Applies the configured rules until a fixed point, so stripping one pattern
// can never uncover another in the output. Empty output is allowed.
std::string clean(const std::string& raw, const CleanConfig& cfg = {});

// Whitespace split, then each ASCII punctuation character becomes its own
// token. Never emits empty tokens. Input is expected to be cleaned already.
std::vector<std::string> tokenize(const std::string& cleaned);

// clean + tokenize in one call.
std::vector<std::string> preprocess(const std::string& raw, const CleanConfig& cfg = {});

namespace utf8 {
// Decodes UTF-8 to codepoints; invalid bytes are dropped. Encode is the inverse
// for valid codepoints.
std::vector<char32_t> decode(const std::string& s);
std::string encode(const std::vector<char32_t>& cps);
bool is_emoji(char32_t cp);
bool is_space(char32_t cp);
}  // namespace utf8

}  // namespace hdet
