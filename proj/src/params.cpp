#include "phasekd/params.hpp"

#include <fstream>

#include "phasekd/io_binary.hpp"

namespace phasekd {

Tensor& ParameterSet::add(const std::string& name, Tensor tensor, bool trainable) {
  if (contains(name)) throw StructuralError("duplicate parameter name: " + name);
  index_[name] = entries_.size();
  entries_.push_back({name, std::move(tensor), trainable});
  return entries_.back().tensor;
}

Tensor& ParameterSet::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw StructuralError("unknown parameter: " + name);
  return entries_[it->second].tensor;
}

const Tensor& ParameterSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw StructuralError("unknown parameter: " + name);
  return entries_[it->second].tensor;
}

std::size_t ParameterSet::value_count() const {
  std::size_t n = 0;
  for (const Entry& e : entries_) n += e.tensor.size();
  return n;
}

void ParameterSet::set_requires_grad(bool flag) {
  for (Entry& e : entries_) e.tensor.set_requires_grad(flag);
}

ParameterSet ParameterSet::deep_copy() const {
  ParameterSet out;
  for (const Entry& e : entries_) out.add(e.name, e.tensor.clone(), e.trainable);
  return out;
}

void ParameterSet::load_values(const ParameterSet& snapshot) {
  if (snapshot.size() != size()) {
    throw StructuralError("parameter count mismatch: " + std::to_string(size()) + " vs " +
                          std::to_string(snapshot.size()));
  }
  for (std::size_t i = 0; i < size(); ++i) {
    const Entry& src = snapshot.entries_[i];
    Entry& dst = entries_[i];
    if (src.name != dst.name) {
      throw StructuralError("parameter name mismatch at position " + std::to_string(i) + ": " +
                            dst.name + " vs " + src.name);
    }
    if (src.tensor.shape() != dst.tensor.shape()) {
      throw StructuralError("parameter shape mismatch for " + dst.name + ": " +
                            shape_to_string(dst.tensor.shape()) + " vs " +
                            shape_to_string(src.tensor.shape()));
    }
    dst.tensor.values() = src.tensor.values();
  }
}

bool ParameterSet::value_equal(const ParameterSet& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (entries_[i].name != other.entries_[i].name) return false;
    if (entries_[i].tensor.shape() != other.entries_[i].tensor.shape()) return false;
    if ((entries_[i].tensor.values() != other.entries_[i].tensor.values()).any()) return false;
  }
  return true;
}

namespace {
constexpr char kMagic[4] = {'P', 'K', 'D', 'W'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void ParameterSet::save(std::ostream& os) const {
  write_magic(os, kMagic);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(size()));
  for (const Entry& e : entries_) {
    write_u32(os, static_cast<std::uint32_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    write_u32(os, static_cast<std::uint32_t>(e.tensor.rank()));
    for (std::size_t d = 0; d < e.tensor.rank(); ++d) write_u64(os, e.tensor.dim(d));
    for (Eigen::Index i = 0; i < e.tensor.values().size(); ++i) write_f64(os, e.tensor.values()(i));
  }
}

ParameterSet ParameterSet::load(std::istream& is) {
  expect_magic(is, kMagic, "PKDW");
  expect_version(is, kVersion, "PKDW");
  const std::uint32_t count = read_u32(is, "parameter count");
  ParameterSet out;
  for (std::uint32_t p = 0; p < count; ++p) {
    const std::uint32_t name_len = read_u32(is, "name length");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw IoError("unexpected end of file reading parameter name");
    const std::uint32_t rank = read_u32(is, "rank");
    Shape shape(rank);
    for (std::uint32_t d = 0; d < rank; ++d) shape[d] = read_u64(is, "dimension");
    ArrayX values(static_cast<Eigen::Index>(shape_size(shape)));
    for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = read_f64(is, "value");
    out.add(name, Tensor::from_array(std::move(shape), std::move(values)));
  }
  return out;
}

void ParameterSet::save_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  save(os);
  if (!os) throw IoError("write failed for " + path);
}

ParameterSet ParameterSet::load_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return load(is);
}

ParameterSet snapshot(const ParameterSet& params) { return params.deep_copy(); }

void load_snapshot(ParameterSet& target, const ParameterSet& snap) { target.load_values(snap); }

}  // namespace phasekd
