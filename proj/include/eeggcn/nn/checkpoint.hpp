#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "eeggcn/nn/network_spec.hpp"
#include "eeggcn/nn/params.hpp"

namespace eeggcn::nn {

inline constexpr const char* kCheckpointMagic = "CGNET1";

// On disk: "CGNET1\n", a one-line JSON header, "\n", then every parameter as a
// little-endian float64 in layout order.
struct Checkpoint {
  NetworkSpec spec;
  ModelParams params;
  std::uint64_t seed = 0;
  int epoch = 0;
  std::string config_json = "{}";  // free-form, stored verbatim under "config"
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace eeggcn::nn
