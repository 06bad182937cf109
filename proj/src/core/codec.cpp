#include "gapcha/codec.hpp"

#include <cstdio>

namespace gapcha {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json placement_to_json(const PlacementAnswer& p) {
  Json arr = Json::array();
  for (const auto& [piece, cell] : p.piece_to_cell) arr.push_back({{"piece", piece}, {"cell", cell}});
  return arr;
}

PlacementAnswer placement_from_json(const Json& arr) {
  PlacementAnswer p;
  for (const auto& item : arr) {
    const int piece = item.at("piece").get<int>();
    if (!p.piece_to_cell.emplace(piece, item.at("cell").get<int>()).second) {
      throw Error(ErrorCode::Malformed, "piece " + std::to_string(piece) + " placed twice");
    }
  }
  return p;
}

std::string type_tag(const Json& j) { return j.at("type").get<std::string>(); }

}  // namespace

void to_json(Json& j, const GapCategory& v) { j = std::string(to_string(v)); }
void from_json(const Json& j, GapCategory& v) { v = gap_from_string(j.get<std::string>()); }
void to_json(Json& j, const AnswerType& v) { j = std::string(to_string(v)); }
void from_json(const Json& j, AnswerType& v) { v = answer_type_from_string(j.get<std::string>()); }

void to_json(Json& j, const DotEvent& v) {
  j = {{"x", v.x}, {"y", v.y}, {"radius", v.radius}, {"appear_ms", v.appear_ms},
       {"disappear_ms", v.disappear_ms}};
}

void from_json(const Json& j, DotEvent& v) {
  j.at("x").get_to(v.x);
  j.at("y").get_to(v.y);
  j.at("radius").get_to(v.radius);
  j.at("appear_ms").get_to(v.appear_ms);
  j.at("disappear_ms").get_to(v.disappear_ms);
}

void to_json(Json& j, const Click& v) { j = {{"x", v.x}, {"y", v.y}, {"t_ms", v.t_ms}}; }

void from_json(const Json& j, Click& v) {
  j.at("x").get_to(v.x);
  j.at("y").get_to(v.y);
  j.at("t_ms").get_to(v.t_ms);
}

void to_json(Json& j, const GroundTruth& v) {
  j = std::visit(
      Overloaded{
          [](const SelectionAnswer& p) -> Json { return {{"type", "select"}, {"cells", p.cells}}; },
          [](const NumericAnswer& p) -> Json { return {{"type", "numeric"}, {"value", p.value}}; },
          [](const ClickSchedule& p) -> Json {
            return {{"type", "click_sequence"}, {"dots", p.dots}, {"quota", p.quota}};
          },
          [](const PlacementAnswer& p) -> Json {
            return {{"type", "placement"}, {"placement", placement_to_json(p)}};
          },
          [](const TextAnswer& p) -> Json { return {{"type", "text_entry"}, {"text", p.text}}; },
      },
      v.payload);
}

void from_json(const Json& j, GroundTruth& v) {
  switch (answer_type_from_string(type_tag(j))) {
    case AnswerType::Select:
      v.payload = SelectionAnswer{j.at("cells").get<std::set<int>>()};
      break;
    case AnswerType::Numeric:
      v.payload = NumericAnswer{j.at("value").get<std::int64_t>()};
      break;
    case AnswerType::ClickSequence:
      v.payload = ClickSchedule{j.at("dots").get<std::vector<DotEvent>>(), j.at("quota").get<int>()};
      break;
    case AnswerType::Placement:
      v.payload = placement_from_json(j.at("placement"));
      break;
    case AnswerType::TextEntry:
      v.payload = TextAnswer{j.at("text").get<std::string>()};
      break;
  }
}

Json answer_to_json(const AnswerSubmission::Payload& payload) {
  return std::visit(
      Overloaded{
          [](const SelectionAnswer& p) -> Json { return {{"type", "select"}, {"cells", p.cells}}; },
          [](const NumericAnswer& p) -> Json { return {{"type", "numeric"}, {"value", p.value}}; },
          [](const ClickAnswer& p) -> Json {
            return {{"type", "click_sequence"}, {"clicks", p.clicks}};
          },
          [](const PlacementAnswer& p) -> Json {
            return {{"type", "placement"}, {"placement", placement_to_json(p)}};
          },
          [](const TextAnswer& p) -> Json { return {{"type", "text_entry"}, {"text", p.text}}; },
      },
      payload);
}

AnswerSubmission::Payload answer_from_json(const Json& j) {
  switch (answer_type_from_string(type_tag(j))) {
    case AnswerType::Select:
      return SelectionAnswer{j.at("cells").get<std::set<int>>()};
    case AnswerType::Numeric:
      return NumericAnswer{j.at("value").get<std::int64_t>()};
    case AnswerType::ClickSequence:
      return ClickAnswer{j.at("clicks").get<std::vector<Click>>()};
    case AnswerType::Placement:
      return placement_from_json(j.at("placement"));
    case AnswerType::TextEntry:
      return TextAnswer{j.at("text").get<std::string>()};
  }
  throw Error(ErrorCode::Malformed, "unreachable answer type");
}

void to_json(Json& j, const InteractionEvent& v) {
  j = {{"primitive", v.primitive}, {"x", v.x}, {"y", v.y}, {"target", v.target}, {"t_ms", v.t_ms}};
}

void from_json(const Json& j, InteractionEvent& v) {
  j.at("primitive").get_to(v.primitive);
  v.x = j.value("x", 0.0);
  v.y = j.value("y", 0.0);
  v.target = j.value("target", std::string());
  j.at("t_ms").get_to(v.t_ms);
}

void to_json(Json& j, const ActionCounts& v) {
  j = {{"click", v.click}, {"drag", v.drag}, {"scroll", v.scroll}, {"keyboard", v.keyboard}};
}

void from_json(const Json& j, ActionCounts& v) {
  v.click = j.value("click", std::int64_t{0});
  v.drag = j.value("drag", std::int64_t{0});
  v.scroll = j.value("scroll", std::int64_t{0});
  v.keyboard = j.value("keyboard", std::int64_t{0});
}

void to_json(Json& j, const TrajectoryRecord& v) {
  j = {{"steps", v.steps}, {"duration_ms", v.duration_ms}, {"actions", v.actions}};
  if (v.reasoning_tokens) {
    j["reasoning_tokens"] = *v.reasoning_tokens;
    j["tokens_per_step"] = *v.tokens_per_step();
  }
  if (!v.events.empty()) j["events"] = v.events;
}

void from_json(const Json& j, TrajectoryRecord& v) {
  v = TrajectoryRecord{};
  v.steps = j.value("steps", std::int64_t{0});
  v.duration_ms = j.value("duration_ms", std::int64_t{0});
  if (j.contains("actions")) j.at("actions").get_to(v.actions);
  if (j.contains("reasoning_tokens") && !j.at("reasoning_tokens").is_null()) {
    v.reasoning_tokens = j.at("reasoning_tokens").get<std::int64_t>();
  }
  // tokens_per_step is derived; any value in the input is ignored.
  if (j.contains("events")) j.at("events").get_to(v.events);
}

void to_json(Json& j, const AnswerSubmission& v) {
  j = {{"challenge_id", v.challenge_id}, {"answer", answer_to_json(v.payload)}};
  if (v.trajectory) j["trajectory"] = *v.trajectory;
}

void from_json(const Json& j, AnswerSubmission& v) {
  j.at("challenge_id").get_to(v.challenge_id);
  v.payload = answer_from_json(j.at("answer"));
  v.trajectory.reset();
  if (j.contains("trajectory") && !j.at("trajectory").is_null()) {
    v.trajectory = j.at("trajectory").get<TrajectoryRecord>();
  }
}

void to_json(Json& j, const VerificationResult& v) {
  j = {{"outcome", std::string(to_string(v.outcome()))},
       {"reason", std::string(to_string(v.reason))},
       {"detail", v.detail}};
}

void from_json(const Json& j, VerificationResult& v) {
  v.reason = reason_from_string(j.at("reason").get<std::string>());
  v.detail = j.value("detail", std::string());
}

void to_json(Json& j, const PixelRect& v) {
  j = {{"x", v.x}, {"y", v.y}, {"width", v.width}, {"height", v.height}};
}

void from_json(const Json& j, PixelRect& v) {
  j.at("x").get_to(v.x);
  j.at("y").get_to(v.y);
  j.at("width").get_to(v.width);
  j.at("height").get_to(v.height);
}

Json schema_to_json(const InteractionSchema& schema) {
  return std::visit(
      Overloaded{
          [](const SelectSchema& s) -> Json {
            return {{"type", "select"}, {"asset_id", s.asset_id}, {"rows", s.rows},
                    {"cols", s.cols}, {"cells", s.cells}};
          },
          [](const NumericSchema& s) -> Json {
            return {{"type", "numeric"}, {"asset_id", s.asset_id}, {"min_value", s.min_value},
                    {"max_value", s.max_value}};
          },
          [](const ClickSchema& s) -> Json {
            return {{"type", "click_sequence"}, {"asset_id", s.asset_id}, {"width", s.width},
                    {"height", s.height}, {"session_ms", s.session_ms}, {"quota", s.quota},
                    {"max_misses", s.max_misses}};
          },
          [](const PlacementSchema& s) -> Json {
            return {{"type", "placement"}, {"rows", s.rows}, {"cols", s.cols},
                    {"piece_width", s.piece_width}, {"piece_height", s.piece_height},
                    {"tray_asset_ids", s.tray_asset_ids}};
          },
          [](const TextSchema& s) -> Json {
            return {{"type", "text_entry"}, {"asset_id", s.asset_id},
                    {"min_length", s.min_length}, {"max_length", s.max_length}};
          },
      },
      schema);
}

InteractionSchema schema_from_json(const Json& j) {
  switch (answer_type_from_string(type_tag(j))) {
    case AnswerType::Select:
      return SelectSchema{j.at("asset_id").get<int>(), j.at("rows").get<int>(),
                          j.at("cols").get<int>(), j.at("cells").get<std::vector<PixelRect>>()};
    case AnswerType::Numeric:
      return NumericSchema{j.at("asset_id").get<int>(), j.at("min_value").get<int>(),
                           j.at("max_value").get<int>()};
    case AnswerType::ClickSequence:
      return ClickSchema{j.at("asset_id").get<int>(),     j.at("width").get<int>(),
                         j.at("height").get<int>(),       j.at("session_ms").get<std::int64_t>(),
                         j.at("quota").get<int>(),        j.at("max_misses").get<int>()};
    case AnswerType::Placement:
      return PlacementSchema{j.at("rows").get<int>(), j.at("cols").get<int>(),
                             j.at("piece_width").get<int>(), j.at("piece_height").get<int>(),
                             j.at("tray_asset_ids").get<std::vector<int>>()};
    case AnswerType::TextEntry:
      return TextSchema{j.at("asset_id").get<int>(), j.at("min_length").get<int>(),
                        j.at("max_length").get<int>()};
  }
  throw Error(ErrorCode::Malformed, "unreachable schema type");
}

void to_json(Json& j, const AssetRef& v) {
  j = {{"asset_id", v.asset_id},
       {"kind", v.kind == AssetKind::StaticImage ? "static_image" : "animation"},
       {"width", v.width},
       {"height", v.height},
       {"frame_count", v.frame_count},
       {"frame_ms", v.frame_ms},
       {"media_type", v.media_type}};
  if (v.url) j["url"] = *v.url;
  if (v.data_base64) j["data_base64"] = *v.data_base64;
}

void from_json(const Json& j, AssetRef& v) {
  j.at("asset_id").get_to(v.asset_id);
  v.kind = j.at("kind").get<std::string>() == "animation" ? AssetKind::Animation
                                                          : AssetKind::StaticImage;
  j.at("width").get_to(v.width);
  j.at("height").get_to(v.height);
  j.at("frame_count").get_to(v.frame_count);
  j.at("frame_ms").get_to(v.frame_ms);
  j.at("media_type").get_to(v.media_type);
  v.url = j.contains("url") ? std::optional(j.at("url").get<std::string>()) : std::nullopt;
  v.data_base64 = j.contains("data_base64")
                      ? std::optional(j.at("data_base64").get<std::string>())
                      : std::nullopt;
}

void to_json(Json& j, const ChallengeBundle& v) {
  j = {{"challenge_id", v.challenge_id},
       {"family_id", v.family_id},
       {"answer_type", v.answer_type},
       {"instruction", v.instruction},
       {"assets", v.assets},
       {"interaction_schema", schema_to_json(v.interaction_schema)},
       {"issued_at", v.issued_at_ms},
       {"ttl", v.ttl_ms}};
}

void from_json(const Json& j, ChallengeBundle& v) {
  j.at("challenge_id").get_to(v.challenge_id);
  j.at("family_id").get_to(v.family_id);
  j.at("answer_type").get_to(v.answer_type);
  j.at("instruction").get_to(v.instruction);
  j.at("assets").get_to(v.assets);
  v.interaction_schema = schema_from_json(j.at("interaction_schema"));
  j.at("issued_at").get_to(v.issued_at_ms);
  j.at("ttl").get_to(v.ttl_ms);
}

void to_json(Json& j, const FamilyDescriptor& v) {
  j = {{"family_id", v.family_id},
       {"display_name", v.display_name},
       {"answer_type", v.answer_type},
       {"gaps", v.gaps},
       {"generative", v.generative},
       {"default_instruction_template", v.default_instruction_template}};
}

// ---------------------------------------------------------------------------
// scenes
// ---------------------------------------------------------------------------

void to_json(Json& j, const Color& v) { j = Json::array({v.r, v.g, v.b, v.a}); }

void from_json(const Json& j, Color& v) {
  v = Color{j.at(0).get<std::uint8_t>(), j.at(1).get<std::uint8_t>(), j.at(2).get<std::uint8_t>(),
            j.at(3).get<std::uint8_t>()};
}

void to_json(Json& j, const Point& v) { j = Json::array({v.x, v.y}); }
void from_json(const Json& j, Point& v) { v = Point{j.at(0).get<double>(), j.at(1).get<double>()}; }

void to_json(Json& j, const GlyphShape& v) {
  j = {{"x", v.x}, {"y", v.y}, {"scale", v.scale}, {"ch", std::string(1, v.ch)}};
}

void from_json(const Json& j, GlyphShape& v) {
  j.at("x").get_to(v.x);
  j.at("y").get_to(v.y);
  j.at("scale").get_to(v.scale);
  const auto ch = j.at("ch").get<std::string>();
  if (ch.size() != 1) throw Error(ErrorCode::Malformed, "glyph must be a single character");
  v.ch = ch[0];
}

void to_json(Json& j, const Layer& v) {
  j = std::visit(Overloaded{
                     [](const CircleShape& s) -> Json {
                       return {{"type", "circle"}, {"cx", s.cx}, {"cy", s.cy}, {"radius", s.radius}};
                     },
                     [](const RectShape& s) -> Json {
                       return {{"type", "rect"}, {"x", s.x}, {"y", s.y}, {"width", s.width},
                               {"height", s.height}};
                     },
                     [](const PolygonShape& s) -> Json {
                       return {{"type", "polygon"}, {"vertices", s.vertices}};
                     },
                     [](const GlyphShape& s) -> Json {
                       Json g = s;
                       g["type"] = "glyph";
                       return g;
                     },
                 },
                 v.shape);
  j["color"] = v.color;
  j["z"] = v.z;
  if (!v.region.empty()) j["region"] = v.region;
}

void from_json(const Json& j, Layer& v) {
  const auto type = type_tag(j);
  if (type == "circle") {
    v.shape = CircleShape{j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("radius").get<double>()};
  } else if (type == "rect") {
    v.shape = RectShape{j.at("x").get<double>(), j.at("y").get<double>(), j.at("width").get<double>(),
                        j.at("height").get<double>()};
  } else if (type == "polygon") {
    v.shape = PolygonShape{j.at("vertices").get<std::vector<Point>>()};
  } else if (type == "glyph") {
    v.shape = j.get<GlyphShape>();
  } else {
    throw Error(ErrorCode::Malformed, "unknown primitive '" + type + "'");
  }
  j.at("color").get_to(v.color);
  j.at("z").get_to(v.z);
  v.region = j.value("region", std::string());
}

void to_json(Json& j, const GridGeometry& v) {
  j = {{"rows", v.rows}, {"cols", v.cols}, {"cells", v.cells}};
}

void from_json(const Json& j, GridGeometry& v) {
  j.at("rows").get_to(v.rows);
  j.at("cols").get_to(v.cols);
  j.at("cells").get_to(v.cells);
}

namespace {

Json region_to_json(const DotRegion& region) {
  return std::visit(Overloaded{
                        [](const GlyphMask& m) -> Json {
                          return {{"type", "glyph_mask"}, {"glyphs", m.glyphs}, {"drift_px", m.drift_px}};
                        },
                        [](const AnnulusMask& m) -> Json {
                          return {{"type", "annulus"},
                                  {"cx", m.cx},
                                  {"cy", m.cy},
                                  {"inner_radius", m.inner_radius},
                                  {"outer_radius", m.outer_radius},
                                  {"drift_px", m.drift_px},
                                  {"direction", m.direction}};
                        },
                    },
                    region);
}

DotRegion region_from_json(const Json& j) {
  const auto type = type_tag(j);
  if (type == "glyph_mask") {
    return GlyphMask{j.at("glyphs").get<std::vector<GlyphShape>>(), j.at("drift_px").get<int>()};
  }
  if (type == "annulus") {
    return AnnulusMask{j.at("cx").get<int>(),           j.at("cy").get<int>(),
                       j.at("inner_radius").get<int>(), j.at("outer_radius").get<int>(),
                       j.at("drift_px").get<int>(),     j.at("direction").get<int>()};
  }
  throw Error(ErrorCode::Malformed, "unknown dot region '" + type + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void to_json(Json& j, const Animation& v) {
  j = {{"frame_count", v.frame_count}, {"frame_ms", v.frame_ms}};
  std::visit(Overloaded{
                 [&](const DotField& f) {
                   Json regions = Json::array();
                   for (const auto& r : f.regions) regions.push_back(region_to_json(r));
                   j["content"] = {{"type", "dot_field"},
                                   {"dot_count", f.dot_count},
                                   {"dot_radius", f.dot_radius},
                                   {"dot_color", f.dot_color},
                                   {"regions", regions},
                                   {"background_motion", "rerandomize"},
                                   {"noise_key", hex64(f.noise_key)}};
                 },
                 [&](const TimedDots& t) {
                   j["content"] = {{"type", "timed_dots"}, {"dots", t.dots}, {"color", t.color}};
                 },
             },
             v.content);
}

void from_json(const Json& j, Animation& v) {
  j.at("frame_count").get_to(v.frame_count);
  j.at("frame_ms").get_to(v.frame_ms);
  const auto& c = j.at("content");
  const auto type = type_tag(c);
  if (type == "dot_field") {
    DotField f;
    c.at("dot_count").get_to(f.dot_count);
    c.at("dot_radius").get_to(f.dot_radius);
    c.at("dot_color").get_to(f.dot_color);
    for (const auto& r : c.at("regions")) f.regions.push_back(region_from_json(r));
    f.noise_key = std::stoull(c.at("noise_key").get<std::string>(), nullptr, 16);
    v.content = std::move(f);
  } else if (type == "timed_dots") {
    v.content = TimedDots{c.at("dots").get<std::vector<DotEvent>>(), c.at("color").get<Color>()};
  } else {
    throw Error(ErrorCode::Malformed, "unknown animation '" + type + "'");
  }
}

void to_json(Json& j, const SceneDescription& v) {
  j = {{"width", v.width}, {"height", v.height}, {"background", v.background}, {"layers", v.layers}};
  if (v.animation) j["animation"] = *v.animation;
  if (v.cells) j["cells"] = *v.cells;
  if (!v.tray_order.empty()) j["tray_order"] = v.tray_order;
}

void from_json(const Json& j, SceneDescription& v) {
  j.at("width").get_to(v.width);
  j.at("height").get_to(v.height);
  j.at("background").get_to(v.background);
  j.at("layers").get_to(v.layers);
  v.animation = j.contains("animation") ? std::optional(j.at("animation").get<Animation>()) : std::nullopt;
  v.cells = j.contains("cells") ? std::optional(j.at("cells").get<GridGeometry>()) : std::nullopt;
  v.tray_order = j.value("tray_order", std::vector<int>{});
}

}  // namespace gapcha
