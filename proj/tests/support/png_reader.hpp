#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace testsupport {

struct DecodedImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;
};

/// Decodes a PNG with libpng into RGBA8.
DecodedImage decode_png(const std::vector<std::uint8_t>& bytes);

struct DecodedAnimation {
  int width = 0;
  int height = 0;
  int declared_frames = 0;  // acTL num_frames
  std::vector<DecodedImage> frames;
  std::vector<double> delays_s;  // per fcTL delay_num / delay_den
};

/// Splits an APNG into per-frame standalone PNGs and decodes each with libpng.
DecodedAnimation decode_apng(const std::vector<std::uint8_t>& bytes);

struct Chunk {
  std::string type;
  std::vector<std::uint8_t> data;
};
/// Chunk list of a PNG stream; throws on a bad signature or CRC.
std::vector<Chunk> read_chunks(const std::vector<std::uint8_t>& bytes);

}  // namespace testsupport
