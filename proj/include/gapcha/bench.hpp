#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gapcha/generators.hpp"

namespace gapcha::bench {

enum class Profile { Main, Lite };

Profile profile_from_string(std::string_view text);
std::string_view to_string(Profile profile);
/// Instances per family: 20 for main, 5 for lite.
int per_family(Profile profile);

struct ManifestEntry {
  std::string family_id;
  int index = 0;
  Seed seed;
  DifficultyParams params;  // resolved
  std::string path;         // relative to the benchmark root
};

struct Manifest {
  Profile profile = Profile::Lite;
  std::uint64_t master_seed = 0;
  std::vector<std::string> families;
  std::vector<ManifestEntry> instances;
};

/// Writes {family}/{index}/bundle.json plus assets, answers/{family}/{index}/
/// truth.json and instance.json, and manifest.json. Generator errors are
/// rethrown with the family and index attached.
Manifest generate_bench(const std::filesystem::path& out_dir, Profile profile, std::uint64_t master_seed);

/// Rebuilds a benchmark from the per-instance seeds and params of a manifest.
void regenerate_from_manifest(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir);

Manifest read_manifest(const std::filesystem::path& path);

struct CheckFailure {
  std::string family_id;
  int index = 0;
  std::string what;
};

struct SelfcheckReport {
  int instances = 0;
  std::vector<CheckFailure> failures;
  bool ok() const { return failures.empty(); }
};

/// Oracle agreement plus verifier soundness and sensitivity for every instance.
SelfcheckReport selfcheck(const std::filesystem::path& bench_dir);

/// Hex digest over every file's relative path and bytes, in sorted path order.
std::string tree_digest(const std::filesystem::path& dir);

}  // namespace gapcha::bench
