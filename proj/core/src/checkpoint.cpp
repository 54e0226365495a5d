#include "lle/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "lle/error.hpp"

namespace lle {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

constexpr char kMagic[4] = {'L', 'L', 'E', '1'};
constexpr const char* kWidthScaleName = "meta.width_scale";

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw IoError("cannot open checkpoint '" + path.string() + "'");
  }

  template <typename T>
  T get(const std::string& what) {
    T v{};
    read(reinterpret_cast<char*>(&v), sizeof(T), what);
    return v;
  }

  void read(char* dst, std::size_t n, const std::string& what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) {
      throw CheckpointError("corrupt checkpoint '" + path_.string() + "': truncated while reading " + what);
    }
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

std::vector<StoredTensor> to_stored(const ModelPair& models) {
  std::vector<StoredTensor> out;
  out.push_back({kWidthScaleName, {1}, {static_cast<float>(models.generator.width_scale())}});
  for (const auto& params : {models.generator.parameters(), models.discriminator.parameters()}) {
    for (const auto& p : params) {
      out.push_back({p.name, p.tensor.shape(), std::vector<float>(p.tensor.data().begin(), p.tensor.data().end())});
    }
  }
  return out;
}

void fill(const std::vector<NamedParam>& params, const std::unordered_map<std::string, const StoredTensor*>& by_name,
          const std::filesystem::path& path) {
  // Validate everything before mutating so a failed load leaves the model intact.
  for (const auto& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) {
      throw CheckpointError("checkpoint '" + path.string() + "' is missing tensor '" + p.name + "'");
    }
    if (it->second->shape != p.tensor.shape()) {
      throw CheckpointError("shape mismatch for tensor '" + p.name + "': checkpoint has " +
                            ag::shape_to_string(it->second->shape) + ", model expects " +
                            ag::shape_to_string(p.tensor.shape()));
    }
  }
  for (auto p : params) {
    const auto& src = by_name.at(p.name)->data;
    std::copy(src.begin(), src.end(), p.tensor.mutable_data().begin());
  }
}

std::unordered_map<std::string, const StoredTensor*> index(const std::vector<StoredTensor>& tensors) {
  std::unordered_map<std::string, const StoredTensor*> by_name;
  for (const auto& t : tensors) by_name.emplace(t.name, &t);
  return by_name;
}

}  // namespace

void write_tensor_file(const std::filesystem::path& path, const std::vector<StoredTensor>& tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) throw ArgumentError("tensor name too long");
    if (t.shape.size() > std::numeric_limits<std::uint8_t>::max()) throw ArgumentError("tensor rank too large");
    if (ag::shape_numel(t.shape) != t.data.size()) {
      throw ShapeError("tensor '" + t.name + "' data does not match its shape");
    }
    put<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(t.shape.size()));
    for (std::size_t e : t.shape) put<std::uint32_t>(out, static_cast<std::uint32_t>(e));
    out.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * 4));
  }
  if (!out) throw IoError("short write to checkpoint '" + path.string() + "'");
}

std::vector<StoredTensor> read_tensor_file(const std::filesystem::path& path) {
  Reader in(path);
  char magic[4];
  in.read(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError("corrupt checkpoint '" + path.string() + "': magic mismatch (expected LLE1)");
  }
  const auto count = in.get<std::uint32_t>("tensor count");
  std::vector<StoredTensor> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string slot = "tensor #" + std::to_string(i);
    StoredTensor t;
    const auto name_len = in.get<std::uint16_t>(slot + " name length");
    t.name.resize(name_len);
    in.read(t.name.data(), name_len, slot + " name");
    const auto rank = in.get<std::uint8_t>("rank of tensor '" + t.name + "'");
    for (std::uint8_t r = 0; r < rank; ++r) t.shape.push_back(in.get<std::uint32_t>("extents of tensor '" + t.name + "'"));
    t.data.resize(ag::shape_numel(t.shape));
    in.read(reinterpret_cast<char*>(t.data.data()), t.data.size() * 4, "samples of tensor '" + t.name + "'");
    tensors.push_back(std::move(t));
  }
  if (!in.at_end()) throw CheckpointError("corrupt checkpoint '" + path.string() + "': trailing bytes");
  return tensors;
}

void save_checkpoint(const ModelPair& models, const std::filesystem::path& path) {
  write_tensor_file(path, to_stored(models));
}

ModelPair load_checkpoint(const std::filesystem::path& path) {
  const auto tensors = read_tensor_file(path);
  const auto by_name = index(tensors);
  auto it = by_name.find(kWidthScaleName);
  if (it == by_name.end() || it->second->data.size() != 1) {
    throw CheckpointError("checkpoint '" + path.string() + "' lacks '" + kWidthScaleName + "'");
  }
  ModelPair models(static_cast<double>(it->second->data[0]));
  fill(models.generator.parameters(), by_name, path);
  fill(models.discriminator.parameters(), by_name, path);
  return models;
}

void load_checkpoint_into(const std::filesystem::path& path, ModelPair& models) {
  const auto tensors = read_tensor_file(path);
  const auto by_name = index(tensors);
  auto params = models.generator.parameters();
  auto disc = models.discriminator.parameters();
  params.insert(params.end(), disc.begin(), disc.end());
  fill(params, by_name, path);
}

void load_generator_into(const std::filesystem::path& path, GeneratorModel& generator) {
  const auto tensors = read_tensor_file(path);
  fill(generator.parameters(), index(tensors), path);
}

}  // namespace lle
