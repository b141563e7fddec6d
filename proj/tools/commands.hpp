#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "patchwarp/augmentation.hpp"
#include "patchwarp/patching.hpp"

namespace patchwarp::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // selfcheck failure or unexpected internal error
  kExitInputError = 2,  // unreadable / unparsable input, bad arguments
  kExitGeometry = 3,    // degenerate layout, missing joint, singular transform
};

struct JobConfig {
  std::filesystem::path source_image;
  std::filesystem::path source_mask;
  std::filesystem::path source_pose;
  std::filesystem::path target_pose;
  GarmentKind kind = GarmentKind::Upper;
  LayoutParams layout;
  bool augment = false;  // apply random erasing to the warped garment
  EraseConfig erase;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  bool diagnostics = false;
  bool record_timings = true;
};

/// Reads a JSON job description. Keys mirror JobConfig; all are optional
/// except where a later command needs them. Throws Parse on malformed input.
JobConfig load_job_config(const std::filesystem::path& path);

int cmd_warp(const JobConfig& config, std::ostream& out, std::ostream& err);

int cmd_align(const std::filesystem::path& garment_mask, const std::filesystem::path& warped_mask,
              const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err);

int cmd_make_fixture(const std::filesystem::path& dir, std::uint64_t seed, double target_shift_x, std::ostream& out,
                     std::ostream& err);

struct SelfcheckOptions {
  std::optional<std::filesystem::path> fixture_dir;
  std::uint64_t seed = 0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double elapsed_ms = 0.0;
};

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options);
int cmd_selfcheck(const SelfcheckOptions& options, std::ostream& out, std::ostream& err);

/// Entry point shared by the `patchwarp` binary and the in-process tests.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace patchwarp::cli
