#include "addictfree/store/store.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>

#include "addictfree/core/error.hpp"

namespace addictfree::store {

namespace {

constexpr std::array<std::string_view, kNamespaceCount> kNames = {
    "users", "events", "fixes", "fences", "feedback", "posts", "notifications", "models", "pois"};

constexpr char kMagic[8] = {'A', 'F', 'S', 'T', 'O', 'R', 'E', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderSize = sizeof kMagic + 4;
constexpr std::size_t kFrameHead = 8;  // u32 length + u32 crc

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const char* p, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= std::uint64_t{static_cast<unsigned char>(p[i])} << (8 * i);
  return v;
}

std::uint32_t crc(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string header() {
  std::string h(kMagic, sizeof kMagic);
  put_u32(h, kFormatVersion);
  return h;
}

std::string frame(Namespace ns, std::string_view key, std::uint64_t version,
                  std::string_view value) {
  std::string payload;
  payload.push_back(static_cast<char>(ns));
  put_u64(payload, version);
  put_u32(payload, static_cast<std::uint32_t>(key.size()));
  payload.append(key);
  put_u32(payload, static_cast<std::uint32_t>(value.size()));
  payload.append(value);
  std::string out;
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  put_u32(out, crc(payload));
  out += payload;
  return out;
}

void write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::StoreCorrupt, std::string("write failed: ") + std::strerror(errno));
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

int open_append(const std::filesystem::path& p) {
  const int fd = ::open(p.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::StoreCorrupt,
                "cannot open " + p.string() + ": " + std::strerror(errno));
  }
  return fd;
}

}  // namespace

std::string_view to_string(Namespace ns) { return kNames[static_cast<std::size_t>(ns)]; }

std::string time_key(std::string_view owner, Timestamp at, std::string_view id) {
  const auto secs = to_epoch(at);
  if (secs < 0) throw Error(ErrorCode::InvalidArgument, "time keys start at 1970");
  char buf[24];
  std::snprintf(buf, sizeof buf, "%012lld", static_cast<long long>(secs));
  std::string key(owner);
  key += '/';
  key += buf;
  key += '/';
  key += id;
  return key;
}

std::optional<Timestamp> time_of_key(std::string_view key) {
  const auto a = key.find('/');
  if (a == std::string_view::npos) return std::nullopt;
  const auto b = key.find('/', a + 1);
  if (b == std::string_view::npos || b - a - 1 != 12) return std::nullopt;
  std::int64_t secs = 0;
  for (std::size_t i = a + 1; i < b; ++i) {
    if (key[i] < '0' || key[i] > '9') return std::nullopt;
    secs = secs * 10 + (key[i] - '0');
  }
  return from_epoch(secs);
}

Store::Store() = default;

Store::Store(std::filesystem::path path, StoreOptions options)
    : path_(std::move(path)), options_(options) {
  replay();
  fd_ = open_append(*path_);
}

Store::~Store() {
  if (fd_ >= 0) ::close(fd_);
}

void Store::replay() {
  std::error_code ec;
  if (!std::filesystem::exists(*path_, ec) || std::filesystem::file_size(*path_) == 0) {
    const int fd = open_append(*path_);
    const std::string h = header();
    write_all(fd, h.data(), h.size());
    ::fsync(fd);
    ::close(fd);
    return;
  }
  std::ifstream in(*path_, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::StoreCorrupt, path_->string() + ": not a store file");
  }
  const auto version = get_le(bytes.data() + sizeof kMagic, 4);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::StoreCorrupt,
                path_->string() + ": unsupported format version " + std::to_string(version));
  }

  std::size_t pos = kHeaderSize;
  std::size_t good_end = pos;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < kFrameHead) break;  // torn frame head
    const auto len = static_cast<std::size_t>(get_le(bytes.data() + pos, 4));
    const auto sum = static_cast<std::uint32_t>(get_le(bytes.data() + pos + 4, 4));
    if (bytes.size() - pos - kFrameHead < len) break;  // torn payload
    const std::string_view payload(bytes.data() + pos + kFrameHead, len);
    const bool last = pos + kFrameHead + len == bytes.size();
    const bool sane = len >= 17 && crc(payload) == sum;
    if (!sane) {
      if (last) break;  // torn final record
      throw Error(ErrorCode::StoreCorrupt,
                  path_->string() + ": bad record at offset " + std::to_string(pos));
    }
    const auto ns = static_cast<std::uint8_t>(payload[0]);
    const auto ver = get_le(payload.data() + 1, 8);
    const auto klen = static_cast<std::size_t>(get_le(payload.data() + 9, 4));
    if (ns >= kNamespaceCount || 13 + klen + 4 > len) {
      throw Error(ErrorCode::StoreCorrupt,
                  path_->string() + ": malformed record at offset " + std::to_string(pos));
    }
    const std::string key(payload.substr(13, klen));
    const auto vlen = static_cast<std::size_t>(get_le(payload.data() + 13 + klen, 4));
    if (13 + klen + 4 + vlen != len) {
      throw Error(ErrorCode::StoreCorrupt,
                  path_->string() + ": malformed record at offset " + std::to_string(pos));
    }
    data_[ns][key] = Versioned{std::string(payload.substr(17 + klen, vlen)), ver};
    pos += kFrameHead + len;
    good_end = pos;
  }
  if (good_end < bytes.size()) {
    std::filesystem::resize_file(*path_, good_end);
  }
}

void Store::check_alive() const {
  if (dead_) throw Error(ErrorCode::StoreCorrupt, "store crashed; reopen it");
}

void Store::append(const std::string& f) {
  if (fd_ < 0) return;
  if (crash_after_) {
    const std::size_t n = std::min(*crash_after_, f.size());
    crash_after_.reset();
    write_all(fd_, f.data(), n);
    dead_ = true;
    throw SimulatedCrash();
  }
  write_all(fd_, f.data(), f.size());
  if (options_.sync) ::fdatasync(fd_);
}

std::uint64_t Store::put(Namespace ns, std::string_view key, std::string_view value,
                         std::optional<std::uint64_t> expected_version) {
  if (key.size() > UINT32_MAX || value.size() > UINT32_MAX - 64) {
    throw Error(ErrorCode::SerializationError, "record too large");
  }
  std::unique_lock lock(mu_);
  check_alive();
  auto& table = data_[static_cast<std::size_t>(ns)];
  auto it = table.find(key);
  const std::uint64_t current = it == table.end() ? 0 : it->second.version;
  if (expected_version && *expected_version != current) {
    throw Error(ErrorCode::VersionConflict,
                std::string(to_string(ns)) + "/" + std::string(key) + ": expected version " +
                    std::to_string(*expected_version) + ", found " + std::to_string(current));
  }
  const std::uint64_t next = current + 1;
  append(frame(ns, key, next, value));
  if (it == table.end()) {
    table.emplace(std::string(key), Versioned{std::string(value), next});
  } else {
    it->second = Versioned{std::string(value), next};
  }
  return next;
}

std::optional<Versioned> Store::get(Namespace ns, std::string_view key) const {
  std::shared_lock lock(mu_);
  check_alive();
  const auto& table = data_[static_cast<std::size_t>(ns)];
  if (auto it = table.find(key); it != table.end()) return it->second;
  return std::nullopt;
}

std::vector<Record> Store::scan(Namespace ns, std::string_view prefix,
                                std::optional<TimeRange> range) const {
  std::shared_lock lock(mu_);
  check_alive();
  std::vector<Record> out;
  const auto& table = data_[static_cast<std::size_t>(ns)];
  for (auto it = table.lower_bound(prefix); it != table.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    if (range) {
      const auto t = time_of_key(it->first);
      if (!t || *t < range->from || *t >= range->to) continue;
    }
    out.push_back(Record{ns, it->first, it->second.value, it->second.version});
  }
  return out;
}

std::size_t Store::size(Namespace ns) const {
  std::shared_lock lock(mu_);
  return data_[static_cast<std::size_t>(ns)].size();
}

void Store::compact() {
  std::unique_lock lock(mu_);
  check_alive();
  if (!path_) return;
  auto tmp = *path_;
  tmp += ".compact";
  std::filesystem::remove(tmp);
  const int fd = open_append(tmp);
  std::string buf = header();
  for (int ns = 0; ns < kNamespaceCount; ++ns) {
    for (const auto& [key, v] : data_[ns]) {
      buf += frame(static_cast<Namespace>(ns), key, v.version, v.value);
      if (buf.size() > (1u << 20)) {
        write_all(fd, buf.data(), buf.size());
        buf.clear();
      }
    }
  }
  write_all(fd, buf.data(), buf.size());
  ::fsync(fd);
  ::close(fd);
  std::filesystem::rename(tmp, *path_);
  ::close(fd_);
  fd_ = open_append(*path_);
}

void Store::inject_crash_after(std::size_t bytes) {
  std::unique_lock lock(mu_);
  crash_after_ = bytes;
}

}  // namespace addictfree::store
