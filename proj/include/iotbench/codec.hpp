#pragma once

// Lossless segment codecs and the on-disk segment record. Layout is
// documented in docs/storage-format.md.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iotbench/types.hpp"

namespace iotbench::codec {

enum class CodecId : std::uint8_t { none = 0, delta_varint = 1, xor_float = 2, dict_string = 3 };

std::string_view to_string(CodecId id);

/// The compressing codec used for a value kind.
CodecId codec_for(ValueKind kind);

class CodecError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint32_t kSegmentMagic = 0x53544f49;  // "IOTS" little-endian
inline constexpr std::uint8_t kSegmentVersion = 1;
inline constexpr std::size_t kSegmentHeaderSize = 36;

struct SegmentHeader {
  CodecId codec = CodecId::none;
  ValueKind kind = ValueKind::float64;
  std::uint32_t count = 0;
  Timestamp first_ts = 0;
  Timestamp last_ts = 0;
  std::uint32_t payload_length = 0;
  std::uint32_t payload_crc = 0;
};

/// Encodes one segment record (header + payload). All points must share one
/// value kind; a codec that does not fit the kind raises CodecError.
std::string encode_segment(std::span<const DataPoint> points, CodecId codec);

/// Reads the header of the record at the start of `bytes`, checking magic and size.
SegmentHeader read_header(std::string_view bytes);

/// Decodes a record produced by encode_segment; verifies the CRC. Points are
/// tagged with `sensor_id`.
std::vector<DataPoint> decode_segment(std::string_view bytes, std::string_view sensor_id);

// Primitive encoders, exposed for tests.
std::uint64_t zigzag(std::int64_t v);
std::int64_t unzigzag(std::uint64_t v);
void put_varint(std::string& out, std::uint64_t v);
std::uint64_t get_varint(std::string_view in, std::size_t& pos);

std::uint32_t crc32(std::string_view bytes);

}  // namespace iotbench::codec
