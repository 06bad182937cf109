#include "gapcha/bundle.hpp"

namespace gapcha {

std::string asset_file_name(int asset_id) { return "asset_" + std::to_string(asset_id) + ".png"; }

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += kAlphabet[v >> 6 & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += kAlphabet[v >> 6 & 63];
    out += '=';
  }
  return out;
}

ChallengeBundle build_bundle(const GeneratedInstance& instance, const std::vector<raster::Asset>& assets,
                             const std::string& challenge_id, std::int64_t issued_at_ms, std::int64_t ttl_ms,
                             AssetDelivery delivery) {
  ChallengeBundle bundle;
  bundle.challenge_id = challenge_id;
  bundle.family_id = instance.family_id;
  bundle.answer_type = instance.truth.answer_type();
  bundle.instruction = instance.instruction;
  bundle.interaction_schema = instance.interaction_schema;
  bundle.issued_at_ms = issued_at_ms;
  bundle.ttl_ms = ttl_ms;
  for (const auto& asset : assets) {
    AssetRef ref;
    ref.asset_id = asset.asset_id;
    ref.kind = asset.kind;
    ref.width = asset.width;
    ref.height = asset.height;
    ref.frame_count = static_cast<int>(asset.frames.size());
    ref.frame_ms = asset.frame_ms;
    ref.media_type = asset.kind == AssetKind::Animation ? "image/apng" : "image/png";
    switch (delivery) {
      case AssetDelivery::Url:
        ref.url = "/v1/assets/" + challenge_id + "/" + std::to_string(asset.asset_id);
        break;
      case AssetDelivery::File:
        ref.url = asset_file_name(asset.asset_id);
        break;
      case AssetDelivery::Inline:
        ref.data_base64 = base64_encode(raster::encode(asset));
        break;
    }
    bundle.assets.push_back(std::move(ref));
  }
  return bundle;
}

void to_json(Json& j, const GeneratedInstance& v) {
  j = {{"family_id", v.family_id},
       {"seed", v.seed.value},
       {"params", v.params},
       {"instruction", v.instruction},
       {"interaction_schema", schema_to_json(v.interaction_schema)},
       {"truth", v.truth},
       {"scene", v.scene}};
}

void from_json(const Json& j, GeneratedInstance& v) {
  j.at("family_id").get_to(v.family_id);
  v.seed = Seed{j.at("seed").get<std::uint64_t>()};
  j.at("params").get_to(v.params);
  j.at("instruction").get_to(v.instruction);
  v.interaction_schema = schema_from_json(j.at("interaction_schema"));
  j.at("truth").get_to(v.truth);
  j.at("scene").get_to(v.scene);
}

}  // namespace gapcha
