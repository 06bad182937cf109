#pragma once

// Canonical JSON forms: UTF-8, lowercase snake_case keys, keys sorted.

#include <string>

#include "json.hpp"

#include "gapcha/registry.hpp"
#include "gapcha/scene.hpp"
#include "gapcha/types.hpp"

namespace gapcha {

using Json = nlohmann::json;

void to_json(Json& j, const GapCategory& v);
void from_json(const Json& j, GapCategory& v);
void to_json(Json& j, const AnswerType& v);
void from_json(const Json& j, AnswerType& v);

void to_json(Json& j, const DotEvent& v);
void from_json(const Json& j, DotEvent& v);
void to_json(Json& j, const Click& v);
void from_json(const Json& j, Click& v);

void to_json(Json& j, const GroundTruth& v);
void from_json(const Json& j, GroundTruth& v);

Json answer_to_json(const AnswerSubmission::Payload& payload);
AnswerSubmission::Payload answer_from_json(const Json& j);

void to_json(Json& j, const InteractionEvent& v);
void from_json(const Json& j, InteractionEvent& v);
void to_json(Json& j, const ActionCounts& v);
void from_json(const Json& j, ActionCounts& v);
void to_json(Json& j, const TrajectoryRecord& v);
void from_json(const Json& j, TrajectoryRecord& v);

void to_json(Json& j, const AnswerSubmission& v);
void from_json(const Json& j, AnswerSubmission& v);

void to_json(Json& j, const VerificationResult& v);
void from_json(const Json& j, VerificationResult& v);

void to_json(Json& j, const PixelRect& v);
void from_json(const Json& j, PixelRect& v);
Json schema_to_json(const InteractionSchema& schema);
InteractionSchema schema_from_json(const Json& j);

void to_json(Json& j, const AssetRef& v);
void from_json(const Json& j, AssetRef& v);
void to_json(Json& j, const ChallengeBundle& v);
void from_json(const Json& j, ChallengeBundle& v);

void to_json(Json& j, const FamilyDescriptor& v);

void to_json(Json& j, const Color& v);
void from_json(const Json& j, Color& v);
void to_json(Json& j, const Point& v);
void from_json(const Json& j, Point& v);
void to_json(Json& j, const GlyphShape& v);
void from_json(const Json& j, GlyphShape& v);
void to_json(Json& j, const Layer& v);
void from_json(const Json& j, Layer& v);
void to_json(Json& j, const GridGeometry& v);
void from_json(const Json& j, GridGeometry& v);
void to_json(Json& j, const Animation& v);
void from_json(const Json& j, Animation& v);
void to_json(Json& j, const SceneDescription& v);
void from_json(const Json& j, SceneDescription& v);

/// Compact canonical serialization.
template <typename T>
std::string to_canonical_json(const T& value) {
  Json j = value;
  return j.dump();
}

}  // namespace gapcha
