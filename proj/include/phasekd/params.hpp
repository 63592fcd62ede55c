#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "phasekd/tensor.hpp"

namespace phasekd {

/// Ordered, named collection of parameter tensors. Iteration follows
/// insertion order; names are unique. Tensors are held by handle, so a model
/// and its ParameterSet share storage.
class ParameterSet {
 public:
  Tensor& add(const std::string& name, Tensor tensor, bool trainable = true);

  bool contains(const std::string& name) const { return index_.count(name) > 0; }
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;

  std::size_t size() const { return entries_.size(); }
  const std::string& name(std::size_t i) const { return entries_[i].name; }
  Tensor& tensor(std::size_t i) { return entries_[i].tensor; }
  const Tensor& tensor(std::size_t i) const { return entries_[i].tensor; }
  bool trainable(std::size_t i) const { return entries_[i].trainable; }

  /// Total number of scalar values across all parameters.
  std::size_t value_count() const;

  /// Flips gradient tracking on every tensor (teacher copies switch it off).
  void set_requires_grad(bool flag);

  /// Value-equal copy with independent storage (teacher snapshots).
  ParameterSet deep_copy() const;

  /// Copies values from `snapshot` into this set's existing tensors.
  /// Requires identical names, order, and shapes.
  void load_values(const ParameterSet& snapshot);

  /// True when both sets hold identical values in identical layouts.
  bool value_equal(const ParameterSet& other) const;

  // "PKDW" container: magic, version u32, count u32, then per parameter
  // u32 name length + UTF-8 name, u32 rank, u64 dims, raw f64 values.
  void save(std::ostream& os) const;
  static ParameterSet load(std::istream& is);
  void save_file(const std::string& path) const;
  static ParameterSet load_file(const std::string& path);

 private:
  struct Entry {
    std::string name;
    Tensor tensor;
    bool trainable;
  };
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Deep copy helper matching the snapshot/load vocabulary used by training.
ParameterSet snapshot(const ParameterSet& params);
void load_snapshot(ParameterSet& target, const ParameterSet& snap);

}  // namespace phasekd
