#pragma once

#include <filesystem>
#include <unordered_map>

#include "hdet/rng.hpp"
#include "hdet/tensor.hpp"
#include "hdet/vocab.hpp"

namespace hdet {

// |V| x d embedding table, one row per vocabulary index. Row 0 (PAD) is all
// zeros. Rows are trainable parameters once handed to a model.
struct EmbeddingMatrix {
    Tensor matrix;
    std::size_t dim() const { return matrix.cols(); }
    std::size_t vocab_size() const { return matrix.rows(); }
};

struct EmbeddingLoad {
    EmbeddingMatrix embeddings;
    std::size_t found_in_file = 0;  // in-vocab tokens that had a file vector
    double coverage(std::size_t vocab_size) const {
        return vocab_size == 0 ? 0.0 : static_cast<double>(found_in_file) / static_cast<double>(vocab_size);
    }
};

// Pre-trained vectors in the plain text format: one line per token,
// "token v1 ... vd" space-separated. Only in-vocab tokens are kept.
// Malformed lines raise ParseError with the line number; a line whose vector
// arity differs from `dim` raises ShapeError.
std::unordered_map<std::string, std::vector<double>> read_embedding_file(
    const std::filesystem::path& path, const Vocab& vocab, std::size_t dim);

// Assembles the matrix: file vectors where available, seeded uniform(-0.05, 0.05)
// rows for in-vocab tokens missing from the file, zeros for PAD.
EmbeddingLoad assemble_embeddings(const std::unordered_map<std::string, std::vector<double>>& vectors,
                                  const Vocab& vocab, std::size_t dim, Rng& rng);

// read_embedding_file + assemble_embeddings in one step.
EmbeddingLoad load_embeddings(const std::filesystem::path& path, const Vocab& vocab,
                              std::size_t dim, Rng& rng);

// No pre-trained file: every non-PAD row gets the uniform(-0.05, 0.05) init.
EmbeddingLoad random_embeddings(const Vocab& vocab, std::size_t dim, Rng& rng);

}  // namespace hdet
