#include "png_reader.hpp"

#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <stdexcept>

namespace testsupport {

namespace {

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_chunk(std::vector<std::uint8_t>& out, const std::string& type, const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const auto start = out.size();
  out.insert(out.end(), type.begin(), type.end());
  out.insert(out.end(), data.begin(), data.end());
  put_u32(out, static_cast<std::uint32_t>(crc32(0, out.data() + start, static_cast<uInt>(out.size() - start))));
}

const std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

}  // namespace

std::vector<Chunk> read_chunks(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || !std::equal(kSignature, kSignature + 8, bytes.begin())) {
    throw std::runtime_error("bad PNG signature");
  }
  std::vector<Chunk> chunks;
  std::size_t pos = 8;
  while (pos + 12 <= bytes.size()) {
    const auto len = get_u32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) throw std::runtime_error("truncated chunk");
    Chunk c;
    c.type.assign(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
    c.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos + 8),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + 8 + len));
    const auto crc = get_u32(&bytes[pos + 8 + len]);
    if (crc != crc32(0, &bytes[pos + 4], 4 + len)) throw std::runtime_error("bad CRC in " + c.type);
    chunks.push_back(std::move(c));
    pos += 12 + len;
  }
  return chunks;
}

DecodedImage decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw std::runtime_error(std::string("libpng: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  DecodedImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.rgba.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.rgba.data(), 0, nullptr)) {
    throw std::runtime_error(std::string("libpng: ") + image.message);
  }
  return out;
}

DecodedAnimation decode_apng(const std::vector<std::uint8_t>& bytes) {
  const auto chunks = read_chunks(bytes);
  DecodedAnimation anim;
  std::vector<std::uint8_t> ihdr;
  std::vector<std::vector<std::uint8_t>> frame_data;
  struct Control {
    int width = 0;
    int height = 0;
    int x = 0;
    int y = 0;
    int dispose = 0;
    int blend = 0;
  };
  std::vector<Control> controls;
  for (const auto& c : chunks) {
    if (c.type == "IHDR") {
      ihdr = c.data;
      anim.width = static_cast<int>(get_u32(&c.data[0]));
      anim.height = static_cast<int>(get_u32(&c.data[4]));
    } else if (c.type == "acTL") {
      anim.declared_frames = static_cast<int>(get_u32(&c.data[0]));
    } else if (c.type == "fcTL") {
      controls.push_back({static_cast<int>(get_u32(&c.data[4])), static_cast<int>(get_u32(&c.data[8])),
                          static_cast<int>(get_u32(&c.data[12])), static_cast<int>(get_u32(&c.data[16])), c.data[24],
                          c.data[25]});
      const auto num = get_u16(&c.data[20]);
      auto den = get_u16(&c.data[22]);
      if (den == 0) den = 100;
      anim.delays_s.push_back(static_cast<double>(num) / den);
      frame_data.emplace_back();
    } else if (c.type == "IDAT") {
      if (frame_data.empty()) throw std::runtime_error("IDAT before fcTL");
      frame_data.back().insert(frame_data.back().end(), c.data.begin(), c.data.end());
    } else if (c.type == "fdAT") {
      frame_data.back().insert(frame_data.back().end(), c.data.begin() + 4, c.data.end());
    }
  }
  // Composite each subframe onto the canvas the way an APNG viewer does.
  std::vector<std::uint8_t> canvas(static_cast<std::size_t>(anim.width) * static_cast<std::size_t>(anim.height) * 4, 0);
  for (std::size_t f = 0; f < frame_data.size(); ++f) {
    const auto& ctl = controls[f];
    if (ctl.x + ctl.width > anim.width || ctl.y + ctl.height > anim.height) {
      throw std::runtime_error("frame region outside canvas");
    }
    std::vector<std::uint8_t> png(kSignature, kSignature + 8);
    auto header = ihdr;
    for (int i = 0; i < 4; ++i) {
      header[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(ctl.width >> (24 - 8 * i));
      header[static_cast<std::size_t>(4 + i)] = static_cast<std::uint8_t>(ctl.height >> (24 - 8 * i));
    }
    put_chunk(png, "IHDR", header);
    put_chunk(png, "IDAT", frame_data[f]);
    put_chunk(png, "IEND", {});
    const auto sub = decode_png(png);

    const auto before = canvas;
    for (int y = 0; y < ctl.height; ++y) {
      for (int x = 0; x < ctl.width; ++x) {
        const auto* src = &sub.rgba[(static_cast<std::size_t>(y) * ctl.width + x) * 4];
        auto* dst = &canvas[(static_cast<std::size_t>(ctl.y + y) * anim.width + ctl.x + x) * 4];
        if (ctl.blend == 0 || src[3] == 255) {
          std::copy(src, src + 4, dst);
        } else if (src[3] != 0) {
          throw std::runtime_error("partial alpha blending not supported");
        }
      }
    }
    anim.frames.push_back(DecodedImage{anim.width, anim.height, canvas});

    if (ctl.dispose == 1) {
      for (int y = 0; y < ctl.height; ++y) {
        auto* row = &canvas[(static_cast<std::size_t>(ctl.y + y) * anim.width + ctl.x) * 4];
        std::fill(row, row + 4 * ctl.width, 0);
      }
    } else if (ctl.dispose == 2) {
      canvas = before;
    }
  }
  return anim;
}

}  // namespace testsupport
