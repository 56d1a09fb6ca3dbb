#include "hdet/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace hdet {

namespace utf8 {

std::vector<char32_t> decode(const std::string& s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto n = s.size();
    while (i < n) {
        const unsigned char b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        std::size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            ++i;  // stray continuation byte, drop
            continue;
        }
        if (i + len > n) {
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            const unsigned char b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

bool is_emoji(char32_t cp) {
    // Pictographic blocks stripped by cleaning. Kept to well-known ranges so
    // the vocabulary stays closed over the embedding file.
    return (cp >= 0x1F000 && cp <= 0x1FFFF)   // emoticons, transport, supplemental symbols, ...
           || (cp >= 0x2600 && cp <= 0x27BF)  // misc symbols + dingbats
           || (cp >= 0x2B00 && cp <= 0x2BFF)  // misc symbols and arrows
           || (cp >= 0xFE00 && cp <= 0xFE0F)  // variation selectors
           || (cp >= 0xE0000 && cp <= 0xE007F)  // tag characters
           || cp == 0x200D                    // zero-width joiner
           || cp == 0x20E3;                   // combining enclosing keycap
}

bool is_space(char32_t cp) {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
        case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
        case 0x205F: case 0x3000: case 0x200B:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

}  // namespace utf8

namespace {

const std::regex& url_re() {
    static const std::regex re(R"((https?://\S*)|(www\.\S*)|(\bt\.co/\S*))",
                               std::regex::ECMAScript | std::regex::icase);
    return re;
}

const std::regex& mention_re() {
    static const std::regex re(R"(@\w+)");
    return re;
}

const std::regex& hashtag_re() {
    static const std::regex re(R"(#(\w+))");
    return re;
}

std::string strip_emoji_pass(const std::string& s) {
    auto cps = utf8::decode(s);
    std::vector<char32_t> kept;
    kept.reserve(cps.size());
    for (char32_t cp : cps) {
        if (!utf8::is_emoji(cp)) kept.push_back(cp);
    }
    return utf8::encode(kept);
}

void erase_char(std::string& s, char c) {
    s.erase(std::remove(s.begin(), s.end(), c), s.end());
}

std::string collapse_spaces(const std::string& s) {
    auto cps = utf8::decode(s);
    std::vector<char32_t> out;
    out.reserve(cps.size());
    bool pending_space = false;
    for (char32_t cp : cps) {
        if (utf8::is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(U' ');
        pending_space = false;
        out.push_back(cp);
    }
    return utf8::encode(out);
}

}  // namespace

std::string clean(const std::string& raw, const CleanConfig& cfg) {
    std::string s = raw;

    if (cfg.lowercase) {
        for (char& c : s) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
    }

    // Stripping one pattern can expose another ("#www.x" -> "www.x"), so the
    // strip passes repeat until the string stops changing.
    for (;;) {
        const std::string before = s;
        if (cfg.strip_emoji) s = strip_emoji_pass(s);
        if (cfg.strip_mentions) {
            s = std::regex_replace(s, mention_re(), "");
            erase_char(s, '@');
        }
        s = std::regex_replace(s, hashtag_re(), cfg.keep_hashtag_word ? "$1" : "");
        erase_char(s, '#');
        if (cfg.strip_urls) s = std::regex_replace(s, url_re(), "");
        if (s == before) break;
    }

    if (cfg.collapse_whitespace) s = collapse_spaces(s);
    return s;
}

std::vector<std::string> tokenize(const std::string& cleaned) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (char ch : cleaned) {
        const unsigned char b = static_cast<unsigned char>(ch);
        if (b < 0x80 && std::isspace(b)) {
            flush();
        } else if (b < 0x80 && std::ispunct(b)) {
            flush();
            tokens.emplace_back(1, ch);
        } else {
            current.push_back(ch);
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> preprocess(const std::string& raw, const CleanConfig& cfg) {
    return tokenize(clean(raw, cfg));
}

}  // namespace hdet
