#include "addictfree/predictor/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace addictfree::predictor {

namespace {

constexpr char kMagic[8] = {'A', 'F', 'L', 'S', 'T', 'M', '\0', '\0'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint codec assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T take(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) {
    throw Error(ErrorCode::SerializationError, "truncated checkpoint");
  }
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  if (!p.shapes_consistent()) throw Error(ErrorCode::ShapeMismatch);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(p.hidden_size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(p.input_size()));
  put<std::uint64_t>(out, ckpt.config.seed);
  put<double>(out, ckpt.config.learning_rate);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.config.epochs));
  put<double>(out, ckpt.config.gradient_clip);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.config.window_hours));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.config.minibatch));
  put<std::uint8_t>(out, ckpt.config.pool_users ? 1 : 0);
  p.for_each([&](double v) { put<double>(out, v); });
  if (!out) throw Error(ErrorCode::SerializationError, "checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::SerializationError, "not a checkpoint");
  }
  if (auto v = take<std::uint32_t>(in); v != kCheckpointVersion) {
    throw Error(ErrorCode::SerializationError,
                "unsupported checkpoint version " + std::to_string(v));
  }
  const auto hidden = take<std::uint32_t>(in);
  const auto inputs = take<std::uint32_t>(in);
  if (hidden == 0 || inputs == 0 || hidden > 4096 || inputs > 4096) {
    throw Error(ErrorCode::SerializationError, "implausible checkpoint shape");
  }
  Checkpoint ckpt;
  ckpt.config.seed = take<std::uint64_t>(in);
  ckpt.config.learning_rate = take<double>(in);
  ckpt.config.epochs = static_cast<int>(take<std::uint32_t>(in));
  ckpt.config.gradient_clip = take<double>(in);
  ckpt.config.window_hours = static_cast<int>(take<std::uint32_t>(in));
  ckpt.config.minibatch = static_cast<int>(take<std::uint32_t>(in));
  ckpt.config.pool_users = take<std::uint8_t>(in) != 0;
  ckpt.config.hidden_size = static_cast<int>(hidden);
  ckpt.params = LstmParamsd::zeros(static_cast<int>(hidden), static_cast<int>(inputs));
  ckpt.params.for_each([&](double& v) { v = take<double>(in); });
  return ckpt;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  std::ostringstream out(std::ios::binary);
  write_checkpoint(out, ckpt);
  return std::move(out).str();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_checkpoint(in);
}

}  // namespace addictfree::predictor
