#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hdet/rng.hpp"

namespace hdet {

// Dense row-major tensor of doubles. No broadcasting: shapes must match
// exactly, which catches equation-transcription bugs at the call site.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);  // zero-filled
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor vector(std::initializer_list<double> values);
    static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
    static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape()); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    std::string shape_str() const;

    // 2-d accessors; throw ShapeError when the tensor is not 2-d.
    std::size_t rows() const;
    std::size_t cols() const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    std::span<double> row_span(std::size_t r);
    std::span<const double> row_span(std::size_t r) const;
    Tensor row(std::size_t r) const;                // copy of row r as a 1-d tensor
    void set_row(std::size_t r, const Tensor& v);

    bool all_finite() const;
    void fill(double v);

  private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// --- linear algebra kernels -------------------------------------------------

// m (r x c) * v (c) -> (r)
Tensor matvec(const Tensor& m, const Tensor& v);
// m^T (c x r) * v (r) -> (c), without materializing the transpose
Tensor matvec_transposed(const Tensor& m, const Tensor& v);
// acc (r x c) += u (r) outer v (c)
void add_outer(Tensor& acc, const Tensor& u, const Tensor& v);
// acc += x, acc += s * x
void add_inplace(Tensor& acc, const Tensor& x);
void axpy(Tensor& acc, double s, const Tensor& x);
double dot(const Tensor& a, const Tensor& b);

// --- elementwise ops ---------------------------------------------------------

double sigmoid_scalar(double x);  // numerically stable split form

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

// --- initialization ----------------------------------------------------------

struct InitSpec {
    enum class Scheme { Uniform, Glorot, Zeros };
    Scheme scheme = Scheme::Zeros;
    double lo = 0.0;  // Uniform bounds; requires lo < hi
    double hi = 0.0;

    static InitSpec uniform(double lo, double hi) { return {Scheme::Uniform, lo, hi}; }
    static InitSpec glorot() { return {Scheme::Glorot, 0, 0}; }
    static InitSpec zeros() { return {Scheme::Zeros, 0, 0}; }
};

// Deterministic given the rng seed. Glorot bound = sqrt(6 / (fan_in + fan_out)),
// where a 2-d [r x c] tensor has fan_in = c and fan_out = r; 1-d tensors use
// their length for both.
Tensor init(std::vector<std::size_t> shape, const InitSpec& spec, Rng& rng);

}  // namespace hdet
