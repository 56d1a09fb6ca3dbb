#include "hdet/embeddings.hpp"

#include <charconv>
#include <fstream>

#include "hdet/errors.hpp"

namespace hdet {

namespace {

// Locale-independent decimal parse.
bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

std::unordered_map<std::string, std::vector<double>> read_embedding_file(
    const std::filesystem::path& path, const Vocab& vocab, std::size_t dim) {
    std::ifstream in(path);
    if (!in) throw IoError("embeddings: cannot read " + path.string());

    std::unordered_map<std::string, std::vector<double>> vectors;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const std::size_t tok_end = line.find(' ');
        if (tok_end == std::string::npos) {
            throw ParseError("embeddings: line " + std::to_string(lineno) + ": no vector values");
        }
        std::string token = line.substr(0, tok_end);

        std::vector<double> values;
        values.reserve(dim);
        std::size_t pos = tok_end + 1;
        while (pos <= line.size()) {
            std::size_t next = line.find(' ', pos);
            if (next == std::string::npos) next = line.size();
            if (next > pos) {
                double v;
                if (!parse_double({line.data() + pos, next - pos}, v)) {
                    throw ParseError("embeddings: line " + std::to_string(lineno) +
                                     ": non-numeric value '" + line.substr(pos, next - pos) + "'");
                }
                values.push_back(v);
            }
            pos = next + 1;
        }
        if (values.size() != dim) {
            throw ShapeError("embeddings: line " + std::to_string(lineno) + ": expected " +
                             std::to_string(dim) + " values, found " + std::to_string(values.size()));
        }
        if (vocab.contains(token) && !vectors.count(token)) {
            vectors.emplace(std::move(token), std::move(values));
        }
    }
    return vectors;
}

EmbeddingLoad assemble_embeddings(const std::unordered_map<std::string, std::vector<double>>& vectors,
                                  const Vocab& vocab, std::size_t dim, Rng& rng) {
    EmbeddingLoad out;
    out.embeddings.matrix = Tensor({vocab.size(), dim});
    Tensor& m = out.embeddings.matrix;
    for (std::size_t i = Vocab::kPadIndex + 1; i < vocab.size(); ++i) {
        auto it = vectors.find(vocab.token(i));
        auto row = m.row_span(i);
        if (it != vectors.end()) {
            for (std::size_t j = 0; j < dim; ++j) row[j] = it->second[j];
            ++out.found_in_file;
        } else {
            for (std::size_t j = 0; j < dim; ++j) row[j] = rng.uniform(-0.05, 0.05);
        }
    }
    return out;  // PAD row left at zero
}

EmbeddingLoad load_embeddings(const std::filesystem::path& path, const Vocab& vocab,
                              std::size_t dim, Rng& rng) {
    return assemble_embeddings(read_embedding_file(path, vocab, dim), vocab, dim, rng);
}

EmbeddingLoad random_embeddings(const Vocab& vocab, std::size_t dim, Rng& rng) {
    return assemble_embeddings({}, vocab, dim, rng);
}

}  // namespace hdet
