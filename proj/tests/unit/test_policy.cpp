#include <gtest/gtest.h>

#include "hashq/errors.hpp"
#include "hashq/policy.hpp"

namespace hashq {
namespace {

TEST(QuantPolicy, UnitOrderIsHashThenWeightActivationPairs) {
  QuantPolicy p = QuantPolicy::uniform(3, 2, 8);
  EXPECT_EQ(p.unit_count(), 7);
  for (int u = 0; u < 7; ++u) p.set_bits_at(u, u + 1);
  EXPECT_EQ(p.hash_bits, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(p.mlp_bits[0], (LayerBits{4, 5}));
  EXPECT_EQ(p.mlp_bits[1], (LayerBits{6, 7}));
  EXPECT_EQ(p.flatten(), (std::vector<int>{1, 2, 3, 4, 5, 6, 7}));
  for (int u = 0; u < 7; ++u) EXPECT_EQ(p.bits_at(u), u + 1);
}

TEST(QuantPolicy, TextRoundTrip) {
  QuantPolicy p = QuantPolicy::uniform(3, 2, 8);
  p.hash_bits[2] = 4;
  p.mlp_bits[0] = {6, 8};
  p.mlp_bits[1] = {4, 4};
  EXPECT_EQ(p.to_string(), "8/8/4/w6a8/w4a4");
  EXPECT_EQ(QuantPolicy::parse(p.to_string()), p);
}

TEST(QuantPolicy, ParseRejectsGarbage) {
  EXPECT_THROW(QuantPolicy::parse(""), FormatError);
  EXPECT_THROW(QuantPolicy::parse("8/x/w8a8"), FormatError);
  EXPECT_THROW(QuantPolicy::parse("8/w8"), FormatError);
  EXPECT_THROW(QuantPolicy::parse("9/w8a8"), FormatError);
  EXPECT_THROW(QuantPolicy::parse("w8a8/8"), FormatError);
}

TEST(QuantPolicy, ValidateBounds) {
  QuantPolicy p = QuantPolicy::uniform(2, 1, 8);
  EXPECT_NO_THROW(p.validate());
  p.hash_bits[0] = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  EXPECT_THROW(QuantPolicy::uniform(2, 1, 9), ConfigError);
  EXPECT_THROW(p.bits_at(4), ConfigError);
}

}  // namespace
}  // namespace hashq
