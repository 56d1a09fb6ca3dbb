#include "hdet/tensor.hpp"

#include <cmath>
#include <sstream>

#include "hdet/errors.hpp"

namespace hdet {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size()) {
        std::ostringstream os;
        os << "tensor: shape " << shape_str() << " does not match data length " << data_.size();
        throw ShapeError(os.str());
    }
}

Tensor Tensor::vector(std::initializer_list<double> values) {
    return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("tensor: ragged matrix initializer");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor({r, c}, std::move(data));
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << "x";
        os << shape_[i];
    }
    os << "]";
    return os.str();
}

std::size_t Tensor::rows() const {
    if (ndim() != 2) throw ShapeError("rows(): tensor is not 2-d, shape " + shape_str());
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (ndim() != 2) throw ShapeError("cols(): tensor is not 2-d, shape " + shape_str());
    return shape_[1];
}

std::span<double> Tensor::row_span(std::size_t r) {
    return {data_.data() + r * shape_[1], shape_[1]};
}

std::span<const double> Tensor::row_span(std::size_t r) const {
    return {data_.data() + r * shape_[1], shape_[1]};
}

Tensor Tensor::row(std::size_t r) const {
    if (ndim() != 2) throw ShapeError("row(): tensor is not 2-d, shape " + shape_str());
    if (r >= shape_[0]) throw ShapeError("row(): index out of range");
    auto s = row_span(r);
    return Tensor({shape_[1]}, std::vector<double>(s.begin(), s.end()));
}

void Tensor::set_row(std::size_t r, const Tensor& v) {
    if (ndim() != 2 || v.ndim() != 1 || v.size() != shape_[1] || r >= shape_[0]) {
        throw ShapeError("set_row(): " + shape_str() + " row <- " + v.shape_str());
    }
    auto s = row_span(r);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = v[i];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::fill(double v) {
    for (double& x : data_) x = v;
}

Tensor matvec(const Tensor& m, const Tensor& v) {
    if (m.ndim() != 2 || v.ndim() != 1 || m.cols() != v.size()) {
        throw ShapeError("matvec: " + m.shape_str() + " * " + v.shape_str());
    }
    const std::size_t r = m.rows(), c = m.cols();
    Tensor out({r});
    const double* md = m.data();
    const double* vd = v.data();
    for (std::size_t i = 0; i < r; ++i) {
        double acc = 0.0;
        const double* row = md + i * c;
        for (std::size_t j = 0; j < c; ++j) acc += row[j] * vd[j];
        out[i] = acc;
    }
    return out;
}

Tensor matvec_transposed(const Tensor& m, const Tensor& v) {
    if (m.ndim() != 2 || v.ndim() != 1 || m.rows() != v.size()) {
        throw ShapeError("matvec_transposed: " + m.shape_str() + "^T * " + v.shape_str());
    }
    const std::size_t r = m.rows(), c = m.cols();
    Tensor out({c});
    const double* md = m.data();
    for (std::size_t i = 0; i < r; ++i) {
        const double s = v[i];
        if (s == 0.0) continue;
        const double* row = md + i * c;
        double* od = out.data();
        for (std::size_t j = 0; j < c; ++j) od[j] += s * row[j];
    }
    return out;
}

void add_outer(Tensor& acc, const Tensor& u, const Tensor& v) {
    if (acc.ndim() != 2 || u.ndim() != 1 || v.ndim() != 1 || acc.rows() != u.size() ||
        acc.cols() != v.size()) {
        throw ShapeError("add_outer: " + acc.shape_str() + " += " + u.shape_str() + " x " + v.shape_str());
    }
    const std::size_t r = acc.rows(), c = acc.cols();
    double* ad = acc.data();
    for (std::size_t i = 0; i < r; ++i) {
        const double s = u[i];
        if (s == 0.0) continue;
        double* row = ad + i * c;
        for (std::size_t j = 0; j < c; ++j) row[j] += s * v[j];
    }
}

void add_inplace(Tensor& acc, const Tensor& x) {
    require_same_shape(acc, x, "add_inplace");
    double* a = acc.data();
    const double* b = x.data();
    for (std::size_t i = 0; i < acc.size(); ++i) a[i] += b[i];
}

void axpy(Tensor& acc, double s, const Tensor& x) {
    require_same_shape(acc, x, "axpy");
    double* a = acc.data();
    const double* b = x.data();
    for (std::size_t i = 0; i < acc.size(); ++i) a[i] += s * b[i];
}

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double sigmoid_scalar(double x) {
    // Split form: never exponentiates a large positive argument.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {
template <typename F>
Tensor map_unary(const Tensor& x, F f) {
    Tensor out(x.shape());
    const double* xd = x.data();
    double* od = out.data();
    for (std::size_t i = 0; i < x.size(); ++i) od[i] = f(xd[i]);
    return out;
}

template <typename F>
Tensor map_binary(const Tensor& a, const Tensor& b, const char* op, F f) {
    require_same_shape(a, b, op);
    Tensor out(a.shape());
    const double* ad = a.data();
    const double* bd = b.data();
    double* od = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) od[i] = f(ad[i], bd[i]);
    return out;
}
}  // namespace

Tensor sigmoid(const Tensor& x) { return map_unary(x, sigmoid_scalar); }
Tensor tanh(const Tensor& x) {
    return map_unary(x, [](double v) { return std::tanh(v); });
}
Tensor relu(const Tensor& x) {
    return map_unary(x, [](double v) { return v > 0.0 ? v : 0.0; });
}
Tensor mul(const Tensor& a, const Tensor& b) {
    return map_binary(a, b, "mul", [](double x, double y) { return x * y; });
}
Tensor add(const Tensor& a, const Tensor& b) {
    return map_binary(a, b, "add", [](double x, double y) { return x + y; });
}
Tensor sub(const Tensor& a, const Tensor& b) {
    return map_binary(a, b, "sub", [](double x, double y) { return x - y; });
}
Tensor scale(const Tensor& a, double s) {
    return map_unary(a, [s](double v) { return s * v; });
}

Tensor init(std::vector<std::size_t> shape, const InitSpec& spec, Rng& rng) {
    Tensor out(std::move(shape));
    switch (spec.scheme) {
        case InitSpec::Scheme::Zeros:
            break;
        case InitSpec::Scheme::Uniform: {
            if (!(spec.lo < spec.hi)) {
                throw ConfigError("init: uniform bounds require lo < hi");
            }
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = rng.uniform(spec.lo, spec.hi);
            break;
        }
        case InitSpec::Scheme::Glorot: {
            const auto& s = out.shape();
            double fan_in, fan_out;
            if (s.size() == 2) {
                fan_out = static_cast<double>(s[0]);
                fan_in = static_cast<double>(s[1]);
            } else {
                fan_in = fan_out = static_cast<double>(out.size());
            }
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = rng.uniform(-bound, bound);
            break;
        }
    }
    return out;
}

}  // namespace hdet
