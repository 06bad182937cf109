#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gapcha/codec.hpp"
#include "gapcha/generators.hpp"
#include "gapcha/raster.hpp"

namespace gapcha {

/// How asset bytes reach the client.
enum class AssetDelivery {
  Url,     // /v1/assets/{challenge_id}/{asset_id}
  File,    // asset_{asset_id}.png next to the bundle
  Inline,  // base64 inside the bundle
};

/// Client-visible view of a generated instance. Carries no truth, seed or scene.
ChallengeBundle build_bundle(const GeneratedInstance& instance, const std::vector<raster::Asset>& assets,
                             const std::string& challenge_id, std::int64_t issued_at_ms, std::int64_t ttl_ms,
                             AssetDelivery delivery);

std::string asset_file_name(int asset_id);
std::string base64_encode(const std::vector<std::uint8_t>& bytes);

void to_json(Json& j, const GeneratedInstance& v);
void from_json(const Json& j, GeneratedInstance& v);

}  // namespace gapcha
