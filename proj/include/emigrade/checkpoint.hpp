#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emigrade/network.hpp"
#include "emigrade/tensor.hpp"

namespace emigrade {

// A serialisable snapshot of a trained network: every parameter tensor
// (weights then biases, per parameterised layer, in layer order).
struct Checkpoint {
  int model_id = 0;
  std::uint32_t epoch = 0;
  std::vector<Tensor<float>> tensors;
};

// Extracts the current parameters of `net` into a checkpoint.
Checkpoint checkpoint_of(const Network<float>& net, int model_id, std::uint32_t epoch);

// Binary checkpoint file, portable across languages:
//   magic "EMIC", version byte = 1, model_id byte, epoch as 32-bit LE,
//   then per tensor: rank byte, dims as 32-bit LE, values as IEEE-754 LE.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint tensors into `net`, validating that every shape matches
// the network built for ckpt.model_id. Mismatches raise DataError with a
// diagnostic naming the offending tensor.
void apply_checkpoint(Network<float>& net, const Checkpoint& ckpt);

}  // namespace emigrade
