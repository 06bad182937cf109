#include "gapcha/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gapcha/bundle.hpp"
#include "gapcha/oracle.hpp"
#include "gapcha/random.hpp"
#include "gapcha/raster.hpp"
#include "gapcha/registry.hpp"
#include "gapcha/verifier.hpp"

namespace gapcha::bench {

namespace fs = std::filesystem;

Profile profile_from_string(std::string_view text) {
  if (text == "main") return Profile::Main;
  if (text == "lite") return Profile::Lite;
  throw Error(ErrorCode::InvalidParams, "unknown profile " + std::string(text));
}

std::string_view to_string(Profile profile) { return profile == Profile::Main ? "main" : "lite"; }

int per_family(Profile profile) { return profile == Profile::Main ? 20 : 5; }

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, std::string(bytes.begin(), bytes.end()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string instance_dir(const std::string& family_id, int index) { return family_id + "/" + std::to_string(index); }

void write_instance(const fs::path& root, const ManifestEntry& entry, std::uint64_t master_seed) {
  GeneratedInstance instance;
  try {
    instance = generate(entry.family_id, entry.seed, entry.params);
  } catch (const Error& e) {
    throw Error(e.code(), entry.family_id + "#" + std::to_string(entry.index) + ": " + e.what());
  }
  const auto assets = raster::rasterize(instance.scene);
  const auto id = derived_nonce_hex(Seed{master_seed}, "challenge:" + entry.path);
  const auto bundle = build_bundle(instance, assets, id, 0, 120000, AssetDelivery::File);
  const fs::path dir = root / entry.path;
  write_file(dir / "bundle.json", Json(bundle).dump(2) + "\n");
  for (const auto& a : assets) write_file(dir / asset_file_name(a.asset_id), raster::encode(a));
  const fs::path answers = root / "answers" / entry.path;
  write_file(answers / "truth.json", Json(instance.truth).dump(2) + "\n");
  write_file(answers / "instance.json", Json(instance).dump() + "\n");
}

Json manifest_json(const Manifest& m) {
  Json instances = Json::array();
  for (const auto& e : m.instances) {
    instances.push_back(
        {{"family_id", e.family_id}, {"index", e.index}, {"seed", e.seed.value}, {"params", e.params}, {"path", e.path}});
  }
  return {{"profile", std::string(to_string(m.profile))},
          {"master_seed", m.master_seed},
          {"per_family", per_family(m.profile)},
          {"families", m.families},
          {"instance_count", m.instances.size()},
          {"instances", instances}};
}

void write_bench(const fs::path& out_dir, const Manifest& manifest) {
  fs::create_directories(out_dir);
  for (const auto& entry : manifest.instances) write_instance(out_dir, entry, manifest.master_seed);
  write_file(out_dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
}

}  // namespace

Manifest generate_bench(const fs::path& out_dir, Profile profile, std::uint64_t master_seed) {
  Manifest manifest;
  manifest.profile = profile;
  manifest.master_seed = master_seed;
  for (const auto& family : registered_families()) {
    if (!family.generative) continue;
    manifest.families.push_back(family.family_id);
    for (int i = 0; i < per_family(profile); ++i) {
      ManifestEntry entry;
      entry.family_id = family.family_id;
      entry.index = i;
      entry.path = instance_dir(family.family_id, i);
      entry.seed = derive_seed(Seed{master_seed}, "instance:" + entry.path);
      entry.params = resolve_params(family.family_id, entry.seed, {});
      manifest.instances.push_back(std::move(entry));
    }
  }
  write_bench(out_dir, manifest);
  return manifest;
}

Manifest read_manifest(const fs::path& path) {
  const auto j = Json::parse(read_file(path));
  Manifest m;
  m.profile = profile_from_string(j.at("profile").get<std::string>());
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  j.at("families").get_to(m.families);
  for (const auto& e : j.at("instances")) {
    ManifestEntry entry;
    e.at("family_id").get_to(entry.family_id);
    e.at("index").get_to(entry.index);
    entry.seed = Seed{e.at("seed").get<std::uint64_t>()};
    e.at("params").get_to(entry.params);
    e.at("path").get_to(entry.path);
    m.instances.push_back(std::move(entry));
  }
  return m;
}

void regenerate_from_manifest(const fs::path& manifest_path, const fs::path& out_dir) {
  write_bench(out_dir, read_manifest(manifest_path));
}

SelfcheckReport selfcheck(const fs::path& bench_dir) {
  const auto manifest = read_manifest(bench_dir / "manifest.json");
  SelfcheckReport report;
  for (const auto& entry : manifest.instances) {
    ++report.instances;
    const auto fail = [&](const std::string& what) { report.failures.push_back({entry.family_id, entry.index, what}); };
    try {
      const auto bundle = Json::parse(read_file(bench_dir / entry.path / "bundle.json")).get<ChallengeBundle>();
      const auto truth = Json::parse(read_file(bench_dir / "answers" / entry.path / "truth.json")).get<GroundTruth>();
      const auto instance =
          Json::parse(read_file(bench_dir / "answers" / entry.path / "instance.json")).get<GeneratedInstance>();
      if (truth.answer_type() != bundle.answer_type) {
        fail("truth variant does not match bundle answer type");
        continue;
      }
      const auto solved = oracle::solve(entry.family_id, bundle.instruction, instance.scene);
      if (!oracle::agrees(truth, solved)) fail("oracle disagrees with truth");

      AnswerSubmission submission{bundle.challenge_id, truth_as_answer(truth), std::nullopt};
      if (!verify(truth, submission).passed()) fail("truth does not verify against itself");
      int cells = 0;
      if (const auto* select = std::get_if<SelectSchema>(&bundle.interaction_schema)) {
        cells = select->rows * select->cols;
      }
      for (auto& wrong : minimal_perturbations(truth, cells)) {
        submission.payload = std::move(wrong);
        if (verify(truth, submission).passed()) {
          fail("a single-step perturbation verifies");
          break;
        }
      }
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  return report;
}

std::string tree_digest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&](std::string_view bytes) {
    h ^= fnv1a64(bytes) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h = splitmix64(h);
  };
  for (const auto& f : files) {
    mix(f.generic_string());
    mix(read_file(dir / f));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gapcha::bench
