#pragma once

#include <iosfwd>
#include <string>

#include "addictfree/predictor/training.hpp"

namespace addictfree::predictor {

struct Checkpoint {
  LstmParamsd params;
  TrainConfig config;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout is described in docs/checkpoint-format.md. Readers throw
// Error{SerializationError} on a bad magic, version, or truncated payload.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

}  // namespace addictfree::predictor
