#include "hdet/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "hdet/errors.hpp"

namespace hdet {

Vocab::Vocab() {
    index_to_token_ = {kPadToken, kUnkToken};
    token_to_index_ = {{kPadToken, kPadIndex}, {kUnkToken, kUnkIndex}};
}

bool Vocab::contains(const std::string& token) const {
    return token_to_index_.count(token) != 0;
}

std::size_t Vocab::index(const std::string& token) const {
    auto it = token_to_index_.find(token);
    return it == token_to_index_.end() ? kUnkIndex : it->second;
}

const std::string& Vocab::token(std::size_t index) const {
    if (index >= index_to_token_.size()) {
        throw ContractError("vocab: index " + std::to_string(index) + " out of range");
    }
    return index_to_token_[index];
}

std::size_t Vocab::add(const std::string& token) {
    if (token == kPadToken || token == kUnkToken) {
        throw ConfigError("vocab: '" + token + "' is reserved");
    }
    if (contains(token)) {
        throw ConfigError("vocab: duplicate token '" + token + "'");
    }
    const std::size_t idx = index_to_token_.size();
    index_to_token_.push_back(token);
    token_to_index_.emplace(token, idx);
    return idx;
}

void Vocab::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("vocab: cannot write " + path.string());
    for (const auto& tok : index_to_token_) out << tok << '\n';
}

Vocab Vocab::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("vocab: cannot read " + path.string());
    Vocab v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line != kPadToken) throw ParseError("vocab: line 1 must be " + std::string(kPadToken));
            continue;
        }
        if (lineno == 2) {
            if (line != kUnkToken) throw ParseError("vocab: line 2 must be " + std::string(kUnkToken));
            continue;
        }
        if (line.empty()) throw ParseError("vocab: empty token at line " + std::to_string(lineno));
        v.add(line);
    }
    return v;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq) {
    if (min_freq < 1) throw ConfigError("build_vocab: min_freq must be >= 1");
    std::map<std::string, std::size_t> freq;
    for (const auto& seq : corpus) {
        for (const auto& tok : seq) {
            if (tok == Vocab::kPadToken || tok == Vocab::kUnkToken) continue;
            ++freq[tok];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> entries;
    entries.reserve(freq.size());
    for (auto& [tok, n] : freq) {
        if (n >= min_freq) entries.emplace_back(tok, n);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocab v;
    for (auto& [tok, n] : entries) v.add(tok);
    return v;
}

std::vector<std::size_t> encode(const std::vector<std::string>& tokens, const Vocab& vocab,
                                std::size_t max_len) {
    if (max_len < 1) throw ConfigError("encode: max_len must be >= 1");
    if (tokens.empty()) return {Vocab::kUnkIndex};
    std::vector<std::size_t> out;
    out.reserve(std::min(tokens.size(), max_len));
    for (const auto& tok : tokens) {
        if (out.size() == max_len) break;
        out.push_back(vocab.index(tok));
    }
    return out;
}

std::vector<std::string> decode(const std::vector<std::size_t>& indices, const Vocab& vocab) {
    std::vector<std::string> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) out.push_back(vocab.token(idx));
    return out;
}

}  // namespace hdet
