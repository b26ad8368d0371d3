#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "addictfree/core/error.hpp"
#include "addictfree/store/store.hpp"

using namespace addictfree;
using namespace addictfree::store;

namespace {

class TempFile {
 public:
  TempFile() {
    static int n = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("afstore-" + std::to_string(::getpid()) + "-" + std::to_string(++n) + ".log");
    std::filesystem::remove(path_);
  }
  ~TempFile() {
    std::filesystem::remove(path_);
    std::filesystem::remove(path_.string() + ".compact");
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(to_string(e.code()));
  }
  return "no error";
}

}  // namespace

TEST(TimeKey, SortsChronologically) {
  const auto a = time_key("u1", from_epoch(999), "x");
  const auto b = time_key("u1", from_epoch(1000), "a");
  EXPECT_EQ(a, "u1/000000000999/x");
  EXPECT_LT(a, b);
  EXPECT_EQ(time_of_key(b), from_epoch(1000));
  EXPECT_FALSE(time_of_key("u1/abc/x"));
  EXPECT_FALSE(time_of_key("plain"));
  EXPECT_THROW(time_key("u", from_epoch(-1), "x"), Error);
}

TEST(Store, PutGetVersions) {
  Store s;
  EXPECT_FALSE(s.get(Namespace::Users, "a"));
  EXPECT_EQ(s.put(Namespace::Users, "a", "v1"), 1u);
  EXPECT_EQ(s.put(Namespace::Users, "a", "v2"), 2u);
  const auto got = s.get(Namespace::Users, "a");
  ASSERT_TRUE(got);
  EXPECT_EQ(got->value, "v2");
  EXPECT_EQ(got->version, 2u);
  // Namespaces are independent.
  EXPECT_FALSE(s.get(Namespace::Events, "a"));
}

TEST(Store, ExpectedVersion) {
  Store s;
  EXPECT_EQ(s.put(Namespace::Posts, "p", "x", 0), 1u);
  EXPECT_EQ(code_of([&] { s.put(Namespace::Posts, "p", "y", 0); }), "version_conflict");
  EXPECT_EQ(code_of([&] { s.put(Namespace::Posts, "p", "y", 2); }), "version_conflict");
  EXPECT_EQ(s.put(Namespace::Posts, "p", "y", 1), 2u);
  EXPECT_EQ(s.get(Namespace::Posts, "p")->value, "y");
}

TEST(Store, ScanPrefixAndRange) {
  Store s;
  for (int i = 0; i < 10; ++i) {
    s.put(Namespace::Events, time_key("u1", from_epoch(1000 + i * 100), "e" + std::to_string(i)), "x");
  }
  s.put(Namespace::Events, time_key("u2", from_epoch(1000), "e"), "x");
  s.put(Namespace::Events, "u10/other", "x");
  EXPECT_EQ(s.scan(Namespace::Events, "u1/").size(), 10u);
  const auto r = s.scan(Namespace::Events, "u1/", TimeRange{from_epoch(1200), from_epoch(1500)});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r.front().key, "u1/000000001200/e2");
  EXPECT_EQ(r.back().key, "u1/000000001400/e4");
  EXPECT_EQ(s.scan(Namespace::Events, "").size(), 12u);
}

TEST(Store, SurvivesReopen) {
  TempFile f;
  {
    Store s(f.path());
    s.put(Namespace::Users, "a", "1");
    s.put(Namespace::Users, "a", "2");
    s.put(Namespace::Models, "a", std::string("\0binary\xff", 8));
  }
  Store s(f.path());
  EXPECT_EQ(s.get(Namespace::Users, "a")->value, "2");
  EXPECT_EQ(s.get(Namespace::Users, "a")->version, 2u);
  EXPECT_EQ(s.get(Namespace::Models, "a")->value, std::string("\0binary\xff", 8));
}

TEST(Store, TornTailIsDropped) {
  TempFile f;
  {
    Store s(f.path());
    s.put(Namespace::Users, "a", "old");
    s.inject_crash_after(11);
    EXPECT_THROW(s.put(Namespace::Users, "a", "new"), SimulatedCrash);
    EXPECT_EQ(code_of([&] { s.get(Namespace::Users, "a"); }), "store_corrupt");
  }
  const auto torn_size = std::filesystem::file_size(f.path());
  {
    Store s(f.path());
    EXPECT_EQ(s.get(Namespace::Users, "a")->value, "old");
    EXPECT_LT(std::filesystem::file_size(f.path()), torn_size);
    s.put(Namespace::Users, "a", "newer");
  }
  Store s(f.path());
  EXPECT_EQ(s.get(Namespace::Users, "a")->value, "newer");
  EXPECT_EQ(s.get(Namespace::Users, "a")->version, 2u);
}

TEST(Store, CrashAtEveryOffset) {
  // Cut one write at each byte boundary: a reopen sees old or new, never a mix.
  TempFile f;
  for (std::size_t cut = 0; cut < 60; ++cut) {
    std::filesystem::remove(f.path());
    {
      Store s(f.path());
      s.put(Namespace::Fences, "k", "before");
      s.inject_crash_after(cut);
      try {
        s.put(Namespace::Fences, "k", "after-the-crash");
      } catch (const SimulatedCrash&) {
      }
    }
    Store s(f.path());
    const auto v = s.get(Namespace::Fences, "k");
    ASSERT_TRUE(v);
    EXPECT_TRUE(v->value == "before" || v->value == "after-the-crash") << cut;
  }
}

TEST(Store, MidFileCorruptionIsReported) {
  TempFile f;
  {
    Store s(f.path());
    s.put(Namespace::Users, "a", "aaaa");
    s.put(Namespace::Users, "b", "bbbb");
  }
  {
    std::fstream io(f.path(), std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(12 + 8 + 18);  // first byte of the first value
    io.put('X');
  }
  EXPECT_EQ(code_of([&] { Store s(f.path()); }), "store_corrupt");
}

TEST(Store, BadHeader) {
  TempFile f;
  std::ofstream(f.path()) << "NOTASTORE-FILE";
  EXPECT_EQ(code_of([&] { Store s(f.path()); }), "store_corrupt");
}

TEST(Store, CompactKeepsLatestValues) {
  TempFile f;
  {
    Store s(f.path());
    for (int i = 0; i < 200; ++i) s.put(Namespace::Users, "k" + std::to_string(i % 5), std::to_string(i));
    const auto before = std::filesystem::file_size(f.path());
    s.compact();
    EXPECT_LT(std::filesystem::file_size(f.path()), before / 10);
    s.put(Namespace::Users, "k0", "post-compact");
  }
  Store s(f.path());
  EXPECT_EQ(s.size(Namespace::Users), 5u);
  EXPECT_EQ(s.get(Namespace::Users, "k4")->value, "199");
  EXPECT_EQ(s.get(Namespace::Users, "k4")->version, 40u);
  EXPECT_EQ(s.get(Namespace::Users, "k0")->value, "post-compact");
}

TEST(Store, ConcurrentConditionalIncrements) {
  TempFile f;
  Store s(f.path(), StoreOptions{false});
  s.put(Namespace::Posts, "counter", "0");
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&] {
      for (int i = 0; i < 100;) {
        const auto cur = s.get(Namespace::Posts, "counter");
        try {
          s.put(Namespace::Posts, "counter", std::to_string(std::stoi(cur->value) + 1), cur->version);
          ++i;
        } catch (const Error&) {
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(s.get(Namespace::Posts, "counter")->value, "400");
  EXPECT_EQ(s.get(Namespace::Posts, "counter")->version, 401u);
}
