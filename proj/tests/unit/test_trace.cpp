#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hashq/errors.hpp"
#include "hashq/trace.hpp"
#include "reference_sim.hpp"

namespace hashq {
namespace {

TEST(Trace, EntryBytes) {
  AccessTrace t;
  t.features_per_level = 2;
  EXPECT_EQ(t.entry_bytes(8), 2u);
  EXPECT_EQ(t.entry_bytes(4), 1u);
  EXPECT_EQ(t.entry_bytes(5), 2u);
  EXPECT_EQ(t.entry_bytes(1), 1u);
  t.features_per_level = 3;
  EXPECT_EQ(t.entry_bytes(3), 2u);
}

TEST(Trace, BinaryRoundTrip) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const AccessTrace t = testing::random_trace(rng, 500, 4, 2, 3);
    std::stringstream ss;
    write_trace(ss, t);
    EXPECT_EQ(read_trace(ss), t);
  }
}

TEST(Trace, HeaderOnlyFileIsEmptyTrace) {
  AccessTrace t;
  t.level_count = 2;
  t.features_per_level = 2;
  t.level_entries = {16, 16};
  std::stringstream ss;
  write_trace(ss, t);
  const auto back = read_trace(ss);
  EXPECT_TRUE(back.accesses.empty());
  EXPECT_TRUE(back.gemms.empty());
}

TEST(Trace, CorruptMagicOrVersionIsFormatError) {
  AccessTrace t;
  t.level_count = 1;
  t.features_per_level = 2;
  t.level_entries = {4};
  std::stringstream ss;
  write_trace(ss, t);
  std::string bytes = ss.str();
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream a(bad_magic);
  EXPECT_THROW(read_trace(a), FormatError);
  std::string bad_version = bytes;
  bad_version[4] = 9;
  std::stringstream b(bad_version);
  EXPECT_THROW(read_trace(b), FormatError);
  std::stringstream c(bytes.substr(0, 10));
  EXPECT_THROW(read_trace(c), FormatError);
}

TEST(Trace, ValidateCatchesOutOfRangeIndex) {
  AccessTrace t;
  t.level_count = 1;
  t.features_per_level = 2;
  t.level_entries = {4};
  t.accesses.push_back({0, 0, 4});
  EXPECT_THROW(t.validate(), FormatError);
}

}  // namespace
}  // namespace hashq
