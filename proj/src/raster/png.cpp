#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <string_view>

#include "gapcha/raster.hpp"

namespace gapcha::raster {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void chunk(std::vector<std::uint8_t>& out, std::string_view type, const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const auto start = out.size();
  out.insert(out.end(), type.begin(), type.end());
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> deflate_rows(int width, int height, std::span<const std::uint8_t> rgba) {
  const auto stride = static_cast<std::size_t>(width) * 4;
  if (rgba.size() != stride * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidParams, "pixel buffer does not match image size");
  }
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    const auto* row = rgba.data() + stride * static_cast<std::size_t>(y);
    raw.insert(raw.end(), row, row + stride);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(len);
  if (compress2(out.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw Error(ErrorCode::Io, "zlib compression failed");
  }
  out.resize(len);
  return out;
}

std::vector<std::uint8_t> header(int width, int height) {
  static constexpr std::array<std::uint8_t, 8> kSignature{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  std::vector<std::uint8_t> out(kSignature.begin(), kSignature.end());
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(6);  // RGBA
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  chunk(out, "IHDR", ihdr);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(int width, int height, std::span<const std::uint8_t> rgba) {
  auto out = header(width, height);
  chunk(out, "IDAT", deflate_rows(width, height, rgba));
  chunk(out, "IEND", {});
  return out;
}

std::vector<std::uint8_t> encode_apng(int width, int height,
                                      const std::vector<std::vector<std::uint8_t>>& frames,
                                      int frame_ms) {
  if (frames.empty()) throw Error(ErrorCode::InvalidParams, "animation without frames");
  auto out = header(width, height);
  std::vector<std::uint8_t> actl;
  put_u32(actl, static_cast<std::uint32_t>(frames.size()));
  put_u32(actl, 0);  // loop forever
  chunk(out, "acTL", actl);

  std::uint32_t seq = 0;
  const auto stride = static_cast<std::size_t>(width) * 4;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    // Later frames only carry the rectangle that changed since the previous one.
    int x0 = 0;
    int y0 = 0;
    int x1 = width;
    int y1 = height;
    if (f > 0) {
      if (frames[f].size() != stride * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::InvalidParams, "pixel buffer does not match image size");
      }
      x0 = width;
      y0 = height;
      x1 = 0;
      y1 = 0;
      for (int y = 0; y < height; ++y) {
        const auto* a = frames[f - 1].data() + stride * static_cast<std::size_t>(y);
        const auto* b = frames[f].data() + stride * static_cast<std::size_t>(y);
        if (std::memcmp(a, b, stride) == 0) continue;
        y0 = std::min(y0, y);
        y1 = y + 1;
        for (int x = 0; x < width; ++x) {
          if (std::memcmp(a + 4 * x, b + 4 * x, 4) != 0) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x + 1);
          }
        }
      }
      if (x1 == 0) {
        x0 = y0 = 0;
        x1 = y1 = 1;
      }
    }
    const int w = x1 - x0;
    const int h = y1 - y0;
    std::vector<std::uint8_t> region;
    region.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 4);
    for (int y = y0; y < y1; ++y) {
      const auto* row = frames[f].data() + stride * static_cast<std::size_t>(y) + 4 * static_cast<std::size_t>(x0);
      region.insert(region.end(), row, row + 4 * w);
    }

    std::vector<std::uint8_t> fctl;
    put_u32(fctl, seq++);
    put_u32(fctl, static_cast<std::uint32_t>(w));
    put_u32(fctl, static_cast<std::uint32_t>(h));
    put_u32(fctl, static_cast<std::uint32_t>(x0));
    put_u32(fctl, static_cast<std::uint32_t>(y0));
    put_u16(fctl, static_cast<std::uint16_t>(frame_ms));
    put_u16(fctl, 1000);
    fctl.push_back(0);  // dispose none
    fctl.push_back(0);  // blend source
    chunk(out, "fcTL", fctl);
    auto data = deflate_rows(w, h, region);
    if (f == 0) {
      chunk(out, "IDAT", data);
    } else {
      std::vector<std::uint8_t> fdat;
      fdat.reserve(data.size() + 4);
      put_u32(fdat, seq++);
      fdat.insert(fdat.end(), data.begin(), data.end());
      chunk(out, "fdAT", fdat);
    }
  }
  chunk(out, "IEND", {});
  return out;
}

std::vector<std::uint8_t> encode(const Asset& asset) {
  if (asset.kind == AssetKind::Animation) {
    return encode_apng(asset.width, asset.height, asset.frames, asset.frame_ms);
  }
  if (asset.frames.empty()) throw Error(ErrorCode::InvalidParams, "asset without pixels");
  return encode_png(asset.width, asset.height, asset.frames.front());
}

}  // namespace gapcha::raster
