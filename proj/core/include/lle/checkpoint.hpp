#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lle/refine_net.hpp"

namespace lle {

/// A named f32 array as stored in the checkpoint container.
struct StoredTensor {
  std::string name;
  ag::Shape shape;
  std::vector<float> data;
};

// Container layout, all integers little-endian:
//   "LLE1"                       4-byte magic
//   u32 tensor count
//   per tensor: u16 name length, UTF-8 name, u8 rank, rank x u32 extents,
//               f32 samples
void write_tensor_file(const std::filesystem::path& path, const std::vector<StoredTensor>& tensors);
/// Throws CheckpointError on bad magic or truncation, naming the tensor being read.
std::vector<StoredTensor> read_tensor_file(const std::filesystem::path& path);

/// Stores both models plus a `meta.width_scale` entry.
void save_checkpoint(const ModelPair& models, const std::filesystem::path& path);

/// Rebuilds models at the stored width scale and fills them.
ModelPair load_checkpoint(const std::filesystem::path& path);

/// Fills existing models in place. Every model parameter must be present with
/// an identical shape; the first offending tensor is named in the error.
void load_checkpoint_into(const std::filesystem::path& path, ModelPair& models);

/// Generator-only variant; discriminator entries are ignored if present.
void load_generator_into(const std::filesystem::path& path, GeneratorModel& generator);

}  // namespace lle
