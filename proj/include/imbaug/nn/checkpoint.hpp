#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imbaug/nn/network.hpp"

namespace imbaug::nn {

// Binary model container:
//   magic "IMBAUGNN", u32 version
//   u32 n_meta, then (string key, string value) pairs
//   u32 n_networks, then per network: string name, u8 mode, u32 n_layers,
//     per layer: u8 kind, u64 in_dim, u64 out_dim, kind payload
// Strings are u32 length + bytes. Integers and f64 arrays are little-endian;
// matrices are row-major. Payloads:
//   dense      W[in*out], b[out]
//   batchnorm  eps, momentum, gamma, beta, running_mean, running_var
//   layernorm  eps, gamma, beta
//   leakyrelu  slope
inline constexpr std::string_view kCheckpointMagic = "IMBAUGNN";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> metadata;
  std::vector<std::pair<std::string, Network>> networks;

  const Network& network(std::string_view name) const;
  const std::string& meta(const std::string& key) const;
};

std::string serialize(const Checkpoint& ckpt);
Checkpoint deserialize(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace imbaug::nn
