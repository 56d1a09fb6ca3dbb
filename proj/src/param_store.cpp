#include "hdet/param_store.hpp"

#include "hdet/errors.hpp"

namespace hdet {

Param& ParamStore::add(std::string name, Tensor value, bool trainable) {
    if (find(name) != nullptr) {
        throw ConfigError("param store: duplicate parameter name '" + name + "'");
    }
    auto p = std::make_unique<Param>();
    p->name = std::move(name);
    p->grad = Tensor::zeros_like(value);
    p->value = std::move(value);
    p->trainable = trainable;
    entries_.push_back(std::move(p));
    return *entries_.back();
}

Param* ParamStore::find(std::string_view name) {
    for (auto& e : entries_) {
        if (e->name == name) return e.get();
    }
    return nullptr;
}

Param& ParamStore::at(std::string_view name) {
    if (Param* p = find(name)) return *p;
    throw ConfigError("param store: no parameter named '" + std::string(name) + "'");
}

const Param& ParamStore::at(std::string_view name) const {
    return const_cast<ParamStore*>(this)->at(name);
}

std::size_t ParamStore::parameter_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e->value.size();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& e : entries_) e->grad.fill(0.0);
}

std::vector<Tensor> ParamStore::snapshot_values() const {
    std::vector<Tensor> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e->value);
    return out;
}

void ParamStore::restore_values(const std::vector<Tensor>& values) {
    if (values.size() != entries_.size()) {
        throw StateError("param store: snapshot size does not match store");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i].same_shape(entries_[i]->value)) {
            throw StateError("param store: snapshot shape mismatch for '" + entries_[i]->name + "'");
        }
        entries_[i]->value = values[i];
    }
}

}  // namespace hdet
