#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "treeseq/autodiff/tensor.hpp"

namespace treeseq::ad {

struct ParamInfo {
  /// Frozen parameters are skipped by backward sinks and the optimizer.
  bool trainable = true;
  /// L2 penalty applies.
  bool regularized = true;
};

/// Named collection of learnable tensors, iterated in insertion order.
///
/// The same type doubles as a gradient buffer: `zeros_like()` yields a set with
/// identical layout whose tensors receive accumulated gradients.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    ParamInfo info;
  };

  /// Adds a parameter; throws ValidationError when the name is taken.
  std::size_t add(std::string name, Tensor value, ParamInfo info = {});

  bool contains(std::string_view name) const;
  /// Throws ValidationError for unknown names.
  std::size_t index(std::string_view name) const;

  Tensor& operator[](std::string_view name) { return entries_[index(name)].value; }
  const Tensor& operator[](std::string_view name) const { return entries_[index(name)].value; }
  Entry& at(std::size_t i) { return entries_.at(i); }
  const Entry& at(std::size_t i) const { return entries_.at(i); }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t scalar_count() const noexcept;
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<Entry>& entries() noexcept { return entries_; }

  ParamSet zeros_like() const;
  void zero();
  bool same_layout(const ParamSet& other) const;

  friend bool operator==(const ParamSet& a, const ParamSet& b);

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace treeseq::ad
