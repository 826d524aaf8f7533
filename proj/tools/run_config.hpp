#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "hashq/accel_sim.hpp"
#include "hashq/ddpg.hpp"
#include "hashq/ngp.hpp"
#include "hashq/search.hpp"

namespace hashq::cli {

struct OracleSection {
  NgpConfig ngp;
  std::filesystem::path image;
  int train_steps = 5000;
  std::filesystem::path checkpoint;  // empty: <out>/oracle.hngp
};

// One file drives the whole pipeline. INI syntax, one section per concern:
// [run] [oracle] [hardware] [agent] [search].
struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  OracleSection oracle;
  HwConfig hardware;
  DdpgConfig agent;
  SearchConfig search;

  std::filesystem::path checkpoint_path() const;
  std::filesystem::path trace_path() const { return out_dir / "trace.htrc"; }
  // Applies the master seed to the oracle, agent and fine-tune streams.
  std::uint64_t oracle_seed() const { return seed; }
  std::uint64_t finetune_seed() const { return seed + 1; }

  void validate() const;
};

// Relative paths inside the file resolve against the file's directory.
// Unknown sections or keys and unparsable values throw ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig default_run_config();

}  // namespace hashq::cli
