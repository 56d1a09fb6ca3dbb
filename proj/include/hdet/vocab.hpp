#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace hdet {

// Token <-> index bijection with fixed PAD=0 and UNK=1 entries.
class Vocab {
  public:
    static constexpr std::size_t kPadIndex = 0;
    static constexpr std::size_t kUnkIndex = 1;
    static constexpr const char* kPadToken = "<pad>";
    static constexpr const char* kUnkToken = "<unk>";

    Vocab();

    std::size_t size() const { return index_to_token_.size(); }
    bool contains(const std::string& token) const;
    std::size_t index(const std::string& token) const;  // UNK for unknown tokens
    const std::string& token(std::size_t index) const;

    // Appends a regular token (index >= 2). Reserved tokens and duplicates are rejected.
    std::size_t add(const std::string& token);

    void save(const std::filesystem::path& path) const;  // one token per line, index order
    static Vocab load(const std::filesystem::path& path);

  private:
    std::unordered_map<std::string, std::size_t> token_to_index_;
    std::vector<std::string> index_to_token_;
};

// Tokens with corpus frequency >= min_freq, ordered by (frequency desc, token asc)
// so vocabulary construction is deterministic. Corpus tokens that collide with
// the reserved PAD/UNK strings are skipped.
Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq);

// Token indices, truncated to max_len (head kept). Sequences are not padded:
// the true length travels with the sequence and the GRU runs exactly that many
// steps. An empty token list encodes as [UNK] so downstream layers always see
// k >= 1.
std::vector<std::size_t> encode(const std::vector<std::string>& tokens, const Vocab& vocab,
                                std::size_t max_len);

// Inverse of encode for in-vocab tokens.
std::vector<std::string> decode(const std::vector<std::size_t>& indices, const Vocab& vocab);

}  // namespace hdet
