#include "iotbench/codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>

#include <zlib.h>

namespace iotbench::codec {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::string_view in, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > in.size()) throw CodecError("segment payload truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += static_cast<std::size_t>(bytes);
  return v;
}

std::uint64_t value_bits(const Value& v) {
  if (auto* d = std::get_if<double>(&v)) return std::bit_cast<std::uint64_t>(*d);
  return static_cast<std::uint64_t>(std::get<std::int64_t>(v));
}

class BitWriter {
 public:
  explicit BitWriter(std::string& out) : out_(out) {}
  void put(std::uint64_t bits, int width) {
    for (int i = width - 1; i >= 0; --i) {
      acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((bits >> i) & 1));
      if (++filled_ == 8) {
        out_.push_back(static_cast<char>(acc_));
        acc_ = 0;
        filled_ = 0;
      }
    }
  }
  void finish() {
    if (filled_ > 0) out_.push_back(static_cast<char>(acc_ << (8 - filled_)));
    filled_ = 0;
    acc_ = 0;
  }

 private:
  std::string& out_;
  std::uint8_t acc_ = 0;
  int filled_ = 0;
};

class BitReader {
 public:
  BitReader(std::string_view in, std::size_t pos) : in_(in), byte_(pos) {}
  std::uint64_t get(int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      if (byte_ >= in_.size()) throw CodecError("xor_float stream truncated");
      int bit = (static_cast<unsigned char>(in_[byte_]) >> (7 - bit_)) & 1;
      v = (v << 1) | static_cast<std::uint64_t>(bit);
      if (++bit_ == 8) {
        bit_ = 0;
        ++byte_;
      }
    }
    return v;
  }
  std::size_t end_pos() const { return bit_ ? byte_ + 1 : byte_; }

 private:
  std::string_view in_;
  std::size_t byte_;
  int bit_ = 0;
};

// Delta-of-delta timestamps, run-length coded as (zigzag dod, run) varint pairs.
void encode_timestamps(std::string& out, std::span<const DataPoint> points) {
  if (points.empty()) return;
  put_varint(out, zigzag(points[0].timestamp));
  std::int64_t prev_delta = 0;
  std::int64_t run_value = 0;
  std::uint64_t run = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    std::int64_t delta = points[i].timestamp - points[i - 1].timestamp;
    std::int64_t dod = delta - prev_delta;
    prev_delta = delta;
    if (run > 0 && dod == run_value) {
      ++run;
      continue;
    }
    if (run > 0) {
      put_varint(out, zigzag(run_value));
      put_varint(out, run);
    }
    run_value = dod;
    run = 1;
  }
  if (run > 0) {
    put_varint(out, zigzag(run_value));
    put_varint(out, run);
  }
}

std::vector<Timestamp> decode_timestamps(std::string_view in, std::size_t& pos, std::size_t count) {
  std::vector<Timestamp> ts;
  if (count == 0) return ts;
  ts.reserve(count);
  ts.push_back(unzigzag(get_varint(in, pos)));
  std::int64_t delta = 0;
  while (ts.size() < count) {
    std::int64_t dod = unzigzag(get_varint(in, pos));
    std::uint64_t run = get_varint(in, pos);
    if (run == 0 || run > count - ts.size()) throw CodecError("bad timestamp run length");
    for (std::uint64_t r = 0; r < run; ++r) {
      delta += dod;
      ts.push_back(ts.back() + delta);
    }
  }
  return ts;
}

void encode_xor(std::string& out, std::span<const DataPoint> points) {
  std::string packed;
  BitWriter bits(packed);
  std::uint64_t prev = value_bits(points[0].value);
  bits.put(prev, 64);
  int prev_lead = -1, prev_trail = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    std::uint64_t cur = value_bits(points[i].value);
    std::uint64_t x = cur ^ prev;
    prev = cur;
    if (x == 0) {
      bits.put(0, 1);
      continue;
    }
    bits.put(1, 1);
    int lead = std::min(std::countl_zero(x), 31);
    int trail = std::countr_zero(x);
    if (prev_lead >= 0 && lead >= prev_lead && trail >= prev_trail) {
      bits.put(0, 1);
      bits.put(x >> prev_trail, 64 - prev_lead - prev_trail);
    } else {
      int len = 64 - lead - trail;
      bits.put(1, 1);
      bits.put(static_cast<std::uint64_t>(lead), 5);
      bits.put(static_cast<std::uint64_t>(len - 1), 6);
      bits.put(x >> trail, len);
      prev_lead = lead;
      prev_trail = trail;
    }
  }
  bits.finish();
  // incompressible input falls back to raw words
  if (packed.size() >= points.size() * 8) {
    out.push_back(1);
    for (const auto& p : points) put_u64(out, value_bits(p.value));
  } else {
    out.push_back(0);
    out += packed;
  }
}

void decode_xor(std::string_view in, std::size_t& pos, std::size_t count, std::vector<std::uint64_t>& words) {
  if (pos >= in.size()) throw CodecError("xor_float stream truncated");
  char mode = in[pos++];
  if (mode == 1) {
    for (std::size_t i = 0; i < count; ++i) words.push_back(get_le(in, pos, 8));
    return;
  }
  if (mode != 0) throw CodecError("unknown xor_float mode");
  BitReader bits(in, pos);
  std::uint64_t prev = bits.get(64);
  words.push_back(prev);
  int lead = 0, trail = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (bits.get(1) == 0) {
      words.push_back(prev);
      continue;
    }
    if (bits.get(1) == 1) {
      lead = static_cast<int>(bits.get(5));
      int len = static_cast<int>(bits.get(6)) + 1;
      trail = 64 - lead - len;
      if (trail < 0) throw CodecError("bad xor_float window");
    }
    std::uint64_t x = bits.get(64 - lead - trail) << trail;
    prev ^= x;
    words.push_back(prev);
  }
  pos = bits.end_pos();
}

void encode_dict(std::string& out, std::span<const DataPoint> points) {
  std::map<std::string_view, std::uint64_t> dict;
  for (const auto& p : points) dict.emplace(std::get<std::string>(p.value), 0);
  put_varint(out, dict.size());
  std::string_view prev;
  std::uint64_t idx = 0;
  for (auto& [s, id] : dict) {
    std::size_t shared = 0;
    while (shared < prev.size() && shared < s.size() && prev[shared] == s[shared]) ++shared;
    put_varint(out, shared);
    put_varint(out, s.size() - shared);
    out.append(s.substr(shared));
    prev = s;
    id = idx++;
  }
  for (const auto& p : points) put_varint(out, dict.at(std::get<std::string>(p.value)));
}

std::vector<std::string> decode_dict(std::string_view in, std::size_t& pos, std::size_t count) {
  std::uint64_t entries = get_varint(in, pos);
  if (entries > in.size()) throw CodecError("bad dictionary size");
  std::vector<std::string> dict;
  dict.reserve(entries);
  for (std::uint64_t e = 0; e < entries; ++e) {
    std::uint64_t shared = get_varint(in, pos);
    std::uint64_t suffix = get_varint(in, pos);
    if ((!dict.empty() && shared > dict.back().size()) || (dict.empty() && shared > 0) || pos + suffix > in.size())
      throw CodecError("bad dictionary entry");
    std::string s = dict.empty() ? std::string{} : dict.back().substr(0, shared);
    s.append(in.substr(pos, suffix));
    pos += suffix;
    dict.push_back(std::move(s));
  }
  std::vector<std::string> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t id = get_varint(in, pos);
    if (id >= dict.size()) throw CodecError("dictionary index out of range");
    values.push_back(dict[id]);
  }
  return values;
}

}  // namespace

std::string_view to_string(CodecId id) {
  switch (id) {
    case CodecId::none: return "none";
    case CodecId::delta_varint: return "delta_varint";
    case CodecId::xor_float: return "xor_float";
    case CodecId::dict_string: return "dict_string";
  }
  return "?";
}

CodecId codec_for(ValueKind kind) {
  switch (kind) {
    case ValueKind::integer: return CodecId::delta_varint;
    case ValueKind::float64: return CodecId::xor_float;
    case ValueKind::string: return CodecId::dict_string;
  }
  return CodecId::none;
}

std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>((v >> 1) ^ (~(v & 1) + 1));
}

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

std::uint64_t get_varint(std::string_view in, std::size_t& pos) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= in.size()) throw CodecError("varint truncated");
    auto byte = static_cast<unsigned char>(in[pos++]);
    v |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
    if (!(byte & 0x80)) return v;
  }
  throw CodecError("varint too long");
}

std::uint32_t crc32(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string encode_segment(std::span<const DataPoint> points, CodecId codec) {
  ValueKind kind = points.empty() ? ValueKind::float64 : kind_of(points.front().value);
  for (const auto& p : points)
    if (kind_of(p.value) != kind) throw CodecError("segment mixes value kinds");
  bool fits = codec == CodecId::none || codec == codec_for(kind);
  if (!points.empty() && !fits)
    throw CodecError(std::string(to_string(codec)) + " cannot encode " + std::string(iotbench::to_string(kind)) +
                     " values");
  if (points.size() > UINT32_MAX) throw CodecError("segment too large");

  std::string payload;
  if (codec == CodecId::none) {
    for (const auto& p : points) {
      put_u64(payload, static_cast<std::uint64_t>(p.timestamp));
      if (auto* s = std::get_if<std::string>(&p.value)) {
        put_u32(payload, static_cast<std::uint32_t>(s->size()));
        payload += *s;
      } else {
        put_u64(payload, value_bits(p.value));
      }
    }
  } else if (!points.empty()) {
    encode_timestamps(payload, points);
    switch (codec) {
      case CodecId::delta_varint: {
        std::uint64_t prev = 0;
        for (const auto& p : points) {
          auto cur = static_cast<std::uint64_t>(std::get<std::int64_t>(p.value));
          put_varint(payload, zigzag(static_cast<std::int64_t>(cur - prev)));
          prev = cur;
        }
        break;
      }
      case CodecId::xor_float: encode_xor(payload, points); break;
      case CodecId::dict_string: encode_dict(payload, points); break;
      case CodecId::none: break;
    }
  }

  std::string out;
  out.reserve(kSegmentHeaderSize + payload.size());
  put_u32(out, kSegmentMagic);
  out.push_back(static_cast<char>(kSegmentVersion));
  out.push_back(static_cast<char>(codec));
  out.push_back(static_cast<char>(kind));
  out.push_back(0);
  put_u32(out, static_cast<std::uint32_t>(points.size()));
  put_u64(out, static_cast<std::uint64_t>(points.empty() ? 0 : points.front().timestamp));
  put_u64(out, static_cast<std::uint64_t>(points.empty() ? 0 : points.back().timestamp));
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  put_u32(out, crc32(payload));
  out += payload;
  return out;
}

SegmentHeader read_header(std::string_view bytes) {
  if (bytes.size() < kSegmentHeaderSize) throw CodecError("segment header truncated");
  std::size_t pos = 0;
  if (get_le(bytes, pos, 4) != kSegmentMagic) throw CodecError("bad segment magic");
  if (static_cast<std::uint8_t>(bytes[4]) != kSegmentVersion) throw CodecError("unsupported segment version");
  SegmentHeader h;
  auto codec = static_cast<std::uint8_t>(bytes[5]);
  auto kind = static_cast<std::uint8_t>(bytes[6]);
  if (codec > 3) throw CodecError("unknown codec id");
  if (kind > 2) throw CodecError("unknown value kind");
  h.codec = static_cast<CodecId>(codec);
  h.kind = static_cast<ValueKind>(kind);
  pos = 8;
  h.count = static_cast<std::uint32_t>(get_le(bytes, pos, 4));
  h.first_ts = static_cast<Timestamp>(get_le(bytes, pos, 8));
  h.last_ts = static_cast<Timestamp>(get_le(bytes, pos, 8));
  h.payload_length = static_cast<std::uint32_t>(get_le(bytes, pos, 4));
  h.payload_crc = static_cast<std::uint32_t>(get_le(bytes, pos, 4));
  if (bytes.size() < kSegmentHeaderSize + h.payload_length) throw CodecError("segment payload truncated");
  return h;
}

std::vector<DataPoint> decode_segment(std::string_view bytes, std::string_view sensor_id) {
  SegmentHeader h = read_header(bytes);
  std::string_view payload = bytes.substr(kSegmentHeaderSize, h.payload_length);
  if (crc32(payload) != h.payload_crc) throw CodecError("segment CRC mismatch");

  std::vector<DataPoint> points;
  points.reserve(h.count);
  std::size_t pos = 0;
  const std::string sensor(sensor_id);
  if (h.codec == CodecId::none) {
    for (std::uint32_t i = 0; i < h.count; ++i) {
      auto ts = static_cast<Timestamp>(get_le(payload, pos, 8));
      Value v;
      switch (h.kind) {
        case ValueKind::integer: v = static_cast<std::int64_t>(get_le(payload, pos, 8)); break;
        case ValueKind::float64: v = std::bit_cast<double>(get_le(payload, pos, 8)); break;
        case ValueKind::string: {
          auto len = get_le(payload, pos, 4);
          if (pos + len > payload.size()) throw CodecError("segment payload truncated");
          v = std::string(payload.substr(pos, len));
          pos += len;
          break;
        }
      }
      points.push_back(DataPoint::make(sensor, ts, std::move(v)));
    }
  } else if (h.count > 0) {
    if (h.codec != codec_for(h.kind)) throw CodecError("codec does not match value kind");
    auto ts = decode_timestamps(payload, pos, h.count);
    switch (h.codec) {
      case CodecId::delta_varint: {
        std::uint64_t prev = 0;
        for (std::uint32_t i = 0; i < h.count; ++i) {
          prev += static_cast<std::uint64_t>(unzigzag(get_varint(payload, pos)));
          points.push_back(DataPoint::make(sensor, ts[i], static_cast<std::int64_t>(prev)));
        }
        break;
      }
      case CodecId::xor_float: {
        std::vector<std::uint64_t> words;
        words.reserve(h.count);
        decode_xor(payload, pos, h.count, words);
        for (std::uint32_t i = 0; i < h.count; ++i)
          points.push_back(DataPoint::make(sensor, ts[i], std::bit_cast<double>(words[i])));
        break;
      }
      case CodecId::dict_string: {
        auto values = decode_dict(payload, pos, h.count);
        for (std::uint32_t i = 0; i < h.count; ++i) points.push_back(DataPoint::make(sensor, ts[i], std::move(values[i])));
        break;
      }
      case CodecId::none: break;
    }
  }
  if (pos != payload.size()) throw CodecError("trailing bytes in segment payload");
  return points;
}

}  // namespace iotbench::codec
