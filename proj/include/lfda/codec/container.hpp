/* Copyright 2026 The LFDA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef LFDA_CODEC_CONTAINER_HPP_
#define LFDA_CODEC_CONTAINER_HPP_

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "lfda/core/bytes.hpp"
#include "lfda/core/crc32.hpp"
#include "lfda/lf/light_field.hpp"

namespace lfda {

// On-disk layout (all integers little-endian), documented in FORMAT.md:
//   header (27 bytes) | 8 x RowPayload | crc32 over everything before it.
// Rows are self-contained so any subset can be decoded independently.
inline constexpr char kContainerMagic[4] = {'L', 'F', 'D', 'A'};
inline constexpr uint8_t kContainerVersion = 1;
inline constexpr size_t kHeaderBytes = 27;

struct ContainerHeader {
  uint8_t version = kContainerVersion;
  uint64_t model_id = 0;
  uint8_t u_count = uint8_t(kViewsPerRow);
  uint8_t v_count = uint8_t(kViewsPerRow);
  uint16_t h = 0;
  uint16_t w = 0;
  uint16_t padded_h = 0;
  uint16_t padded_w = 0;
  uint16_t color_channels = 3;
};

struct RowPayload {
  uint8_t row_index = 0;
  Bytes color_bytes;
  std::array<Bytes, kViewsPerRow> disparity_bytes;

  size_t byte_size() const {
    size_t n = 1 + 4 + color_bytes.size();
    for (const auto& b : disparity_bytes) n += 4 + b.size();
    return n;
  }
};

inline void write_header(ByteWriter& w, const ContainerHeader& h) {
  w.raw({reinterpret_cast<const uint8_t*>(kContainerMagic), 4});
  w.u8(h.version);
  w.u64(h.model_id);
  w.u8(h.u_count);
  w.u8(h.v_count);
  w.u16(h.h);
  w.u16(h.w);
  w.u16(h.padded_h);
  w.u16(h.padded_w);
  w.u16(h.color_channels);
  w.u16(0);  // reserved
}

inline ContainerHeader parse_header(ByteReader& r) {
  auto magic = r.raw(4);
  if (std::memcmp(magic.data(), kContainerMagic, 4) != 0) {
    throw std::runtime_error("container: bad magic");
  }
  ContainerHeader h;
  h.version = r.u8();
  if (h.version != kContainerVersion) {
    throw std::runtime_error("container: unsupported version " +
                             std::to_string(int(h.version)));
  }
  h.model_id = r.u64();
  h.u_count = r.u8();
  h.v_count = r.u8();
  h.h = r.u16();
  h.w = r.u16();
  h.padded_h = r.u16();
  h.padded_w = r.u16();
  h.color_channels = r.u16();
  r.u16();  // reserved
  if (h.padded_h < h.h || h.padded_w < h.w || h.padded_h % 16 != 0 ||
      h.padded_w % 16 != 0) {
    throw std::runtime_error("container: invalid padded dimensions");
  }
  return h;
}

inline void write_payload(ByteWriter& w, const RowPayload& p) {
  w.u8(p.row_index);
  w.u32(uint32_t(p.color_bytes.size()));
  w.raw({p.color_bytes.data(), p.color_bytes.size()});
  for (const auto& d : p.disparity_bytes) {
    w.u32(uint32_t(d.size()));
    w.raw({d.data(), d.size()});
  }
}

inline RowPayload parse_payload(ByteReader& r) {
  RowPayload p;
  p.row_index = r.u8();
  uint32_t n = r.u32();
  auto cb = r.raw(n);
  p.color_bytes.assign(cb.begin(), cb.end());
  for (auto& d : p.disparity_bytes) {
    uint32_t m = r.u32();
    auto db = r.raw(m);
    d.assign(db.begin(), db.end());
  }
  return p;
}

inline Bytes assemble_container(const ContainerHeader& h,
                                const std::array<RowPayload, kViewsPerRow>& rows) {
  Bytes buf;
  ByteWriter w(buf);
  write_header(w, h);
  for (const auto& p : rows) write_payload(w, p);
  w.u32(crc32_ieee({buf.data(), buf.size()}));
  return buf;
}

struct ParsedContainer {
  ContainerHeader header;
  std::array<RowPayload, kViewsPerRow> rows;
};

inline ParsedContainer parse_container(const Bytes& bytes) {
  if (bytes.size() < kHeaderBytes + 4) {
    throw std::runtime_error("container: too short");
  }
  uint32_t stored = uint32_t(bytes[bytes.size() - 4]) |
                    uint32_t(bytes[bytes.size() - 3]) << 8 |
                    uint32_t(bytes[bytes.size() - 2]) << 16 |
                    uint32_t(bytes[bytes.size() - 1]) << 24;
  uint32_t actual = crc32_ieee({bytes.data(), bytes.size() - 4});
  if (stored != actual) {
    throw std::runtime_error("container: CRC mismatch (corrupt stream)");
  }
  ByteReader r({bytes.data(), bytes.size() - 4});
  ParsedContainer pc;
  pc.header = parse_header(r);
  for (size_t i = 0; i < kViewsPerRow; ++i) {
    pc.rows[i] = parse_payload(r);
    if (pc.rows[i].row_index != i) {
      throw std::runtime_error("container: row order violation");
    }
  }
  if (r.remaining() != 0) {
    throw std::runtime_error("container: trailing bytes");
  }
  return pc;
}

}  // namespace lfda

#endif  // LFDA_CODEC_CONTAINER_HPP_
