#include "treeseq/autodiff/param_set.hpp"

#include "treeseq/errors.hpp"

namespace treeseq::ad {

std::size_t ParamSet::add(std::string name, Tensor value, ParamInfo info) {
  if (index_.contains(name)) throw ValidationError("duplicate parameter name '" + name + "'");
  if (value.empty()) throw DimensionError("parameter '" + name + "' has no shape");
  const std::size_t i = entries_.size();
  index_.emplace(name, i);
  entries_.push_back({std::move(name), std::move(value), info});
  return i;
}

bool ParamSet::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

std::size_t ParamSet::index(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown parameter '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParamSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out = *this;
  out.zero();
  return out;
}

void ParamSet::zero() {
  for (auto& e : entries_) e.value.fill(0.0);
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name != other.entries_[i].name) return false;
    if (!entries_[i].value.same_shape(other.entries_[i].value)) return false;
  }
  return true;
}

bool operator==(const ParamSet& a, const ParamSet& b) {
  if (!a.same_layout(b)) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i].value != b.entries_[i].value) return false;
  }
  return true;
}

}  // namespace treeseq::ad
