#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hdet/tensor.hpp"

namespace hdet {

// One trainable tensor with its paired gradient buffer.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    bool trainable = true;
};

// Ordered, name-unique collection of parameters. Entries are heap-allocated so
// layers can hold stable Param* across later registrations. Registration order
// is the canonical order used by the optimizer and the checkpoint format.
class ParamStore {
  public:
    Param& add(std::string name, Tensor value, bool trainable = true);
    Param& at(std::string_view name);
    const Param& at(std::string_view name) const;
    Param* find(std::string_view name);

    std::size_t count() const { return entries_.size(); }
    std::size_t parameter_count() const;

    void zero_grads();

    // Deep copy / restore of parameter values (not grads), by position.
    std::vector<Tensor> snapshot_values() const;
    void restore_values(const std::vector<Tensor>& values);

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

  private:
    std::vector<std::unique_ptr<Param>> entries_;
};

}  // namespace hdet
