#include "fpp/formats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>

namespace fpp {

std::size_t FloatMap::valid_count() const {
  return static_cast<std::size_t>(std::count_if(valid_.data().begin(), valid_.data().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

void FloatMap::restrict_to(const Mask& mask) {
  if (!same_shape(mask)) throw std::invalid_argument("mask dimension mismatch");
  for (std::size_t i = 0; i < size(); ++i) {
    if (!mask[i]) invalidate(i);
  }
}

FringeStack::FringeStack(std::vector<FloatMap> frames) : frames_(std::move(frames)) {
  if (frames_.size() < 3) throw std::invalid_argument("fringe stack needs at least 3 frames");
  for (const auto& f : frames_) {
    if (!f.same_shape(frames_.front())) throw std::invalid_argument("fringe stack frames differ in size");
  }
}

namespace {

void append_ascii(Bytes& out, std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }

void append_u32_le(Bytes& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

// Minimal cursor over an ASCII header.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool expect(std::string_view token) {
    if (bytes_.size() - pos_ < token.size()) return false;
    if (!std::equal(token.begin(), token.end(), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_))) return false;
    pos_ += token.size();
    return true;
  }

  // Non-negative decimal integer, no sign, no leading whitespace.
  bool read_uint(long long& out) {
    std::size_t start = pos_;
    out = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      out = out * 10 + (bytes_[pos_] - '0');
      if (out > std::numeric_limits<int>::max()) return false;
      ++pos_;
    }
    return pos_ > start;
  }

  // PNM-style whitespace, including '#' comments running to end of line.
  bool skip_pnm_whitespace() {
    std::size_t start = pos_;
    while (pos_ < bytes_.size()) {
      auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
    return pos_ > start;
  }

  bool single_whitespace() {
    if (pos_ >= bytes_.size()) return false;
    auto c = bytes_[pos_];
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') return false;
    ++pos_;
    return true;
  }

  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Dims {
  int width;
  int height;
};

// Parses "<magic><width> <height>\n" as written by the fpm/k16 encoders.
Dims read_simple_header(HeaderReader& in, std::string_view magic, std::string_view format) {
  if (!in.expect(magic)) throw DecodeError(DecodeError::Kind::BadMagic, std::string(format) + ": bad magic");
  long long w = 0, h = 0;
  if (!in.read_uint(w) || !in.expect(" ") || !in.read_uint(h) || !in.expect("\n")) {
    throw DecodeError(DecodeError::Kind::BadHeader, std::string(format) + ": malformed header");
  }
  return {static_cast<int>(w), static_cast<int>(h)};
}

void check_payload(std::span<const std::uint8_t> payload, std::size_t expected, std::string_view format) {
  if (payload.size() != expected) {
    throw DecodeError(DecodeError::Kind::LengthMismatch,
                      std::string(format) + ": payload is " + std::to_string(payload.size()) + " bytes, expected " +
                          std::to_string(expected));
  }
}

std::string dims_line(int w, int h) { return std::to_string(w) + " " + std::to_string(h) + "\n"; }

}  // namespace

Bytes encode_fpm(const FloatMap& map) {
  Bytes out;
  append_ascii(out, "FPM1\n");
  append_ascii(out, dims_line(map.width(), map.height()));
  out.reserve(out.size() + map.size() * 4);
  for (double v : map.values()) {
    auto f = static_cast<float>(v);
    if (!std::isfinite(v) || !std::isfinite(f)) throw EncodeError("fpm: non-finite value");
    append_u32_le(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

FloatMap decode_fpm(std::span<const std::uint8_t> bytes) {
  HeaderReader in(bytes);
  auto [w, h] = read_simple_header(in, "FPM1\n", "fpm");
  auto payload = in.rest();
  check_payload(payload, static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 4, "fpm");
  FloatMap map(w, h);
  for (std::size_t i = 0; i < map.size(); ++i) {
    float f = std::bit_cast<float>(read_u32_le(payload.data() + 4 * i));
    if (!std::isfinite(f)) throw DecodeError(DecodeError::Kind::NonFinite, "fpm: non-finite payload value");
    map[i] = f;
  }
  return map;
}

Bytes encode_labelmap(const LabelMap& labels) {
  Bytes out;
  append_ascii(out, "P5\n");
  append_ascii(out, dims_line(labels.width(), labels.height()));
  append_ascii(out, "255\n");
  out.reserve(out.size() + labels.size());
  for (Label l : labels.data()) {
    auto v = static_cast<std::uint8_t>(l);
    if (v > 2) throw EncodeError("labelmap: value outside {0,1,2}");
    out.push_back(v);
  }
  return out;
}

LabelMap decode_labelmap(std::span<const std::uint8_t> bytes) {
  HeaderReader in(bytes);
  if (!in.expect("P5")) throw DecodeError(DecodeError::Kind::BadMagic, "pgm: bad magic");
  long long w = 0, h = 0, maxval = 0;
  bool ok = in.skip_pnm_whitespace() && in.read_uint(w) && in.skip_pnm_whitespace() && in.read_uint(h) &&
            in.skip_pnm_whitespace() && in.read_uint(maxval) && in.single_whitespace();
  if (!ok) throw DecodeError(DecodeError::Kind::BadHeader, "pgm: malformed header");
  if (maxval != 255) throw DecodeError(DecodeError::Kind::BadHeader, "pgm: maxval must be 255");
  auto payload = in.rest();
  check_payload(payload, static_cast<std::size_t>(w) * static_cast<std::size_t>(h), "pgm");
  LabelMap labels(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (payload[i] > 2) throw DecodeError(DecodeError::Kind::InvalidLabel, "pgm: label byte outside {0,1,2}");
    labels[i] = static_cast<Label>(payload[i]);
  }
  return labels;
}

Bytes encode_order_map(const OrderMap& orders) {
  Bytes out;
  append_ascii(out, "K16\n");
  append_ascii(out, dims_line(orders.width(), orders.height()));
  out.reserve(out.size() + orders.size() * 2);
  for (std::int32_t k : orders.data()) {
    if (k < std::numeric_limits<std::int16_t>::min() || k > std::numeric_limits<std::int16_t>::max()) {
      throw EncodeError("k16: fringe order outside int16 range");
    }
    auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(k));
    out.push_back(static_cast<std::uint8_t>(u & 0xFF));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  }
  return out;
}

OrderMap decode_order_map(std::span<const std::uint8_t> bytes) {
  HeaderReader in(bytes);
  auto [w, h] = read_simple_header(in, "K16\n", "k16");
  auto payload = in.rest();
  check_payload(payload, static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 2, "k16");
  OrderMap orders(w, h);
  for (std::size_t i = 0; i < orders.size(); ++i) {
    auto u = static_cast<std::uint16_t>(payload[2 * i] | (payload[2 * i + 1] << 8));
    orders[i] = static_cast<std::int16_t>(u);
  }
  return orders;
}

LabelMap validity_to_labels(const Mask& valid) {
  LabelMap out(valid.width(), valid.height(), Label::Background);
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (valid[i]) out[i] = Label::Reliable;
  }
  return out;
}

Mask labels_to_validity(const LabelMap& labels) {
  Mask out(labels.width(), labels.height(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] != Label::Background ? 1 : 0;
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

FloatMap load_fpm(const std::filesystem::path& path) { return decode_fpm(read_file(path)); }
void save_fpm(const std::filesystem::path& path, const FloatMap& map) { write_file_atomic(path, encode_fpm(map)); }
LabelMap load_labelmap(const std::filesystem::path& path) { return decode_labelmap(read_file(path)); }
void save_labelmap(const std::filesystem::path& path, const LabelMap& labels) {
  write_file_atomic(path, encode_labelmap(labels));
}
OrderMap load_order_map(const std::filesystem::path& path) { return decode_order_map(read_file(path)); }
void save_order_map(const std::filesystem::path& path, const OrderMap& orders) {
  write_file_atomic(path, encode_order_map(orders));
}

std::filesystem::path stack_frame_path(const std::filesystem::path& prefix, int index) {
  std::string suffix = index < 10 ? "_0" + std::to_string(index) : "_" + std::to_string(index);
  auto p = prefix;
  p += suffix + ".fpm";
  return p;
}

FringeStack load_stack(const std::filesystem::path& prefix) {
  std::vector<FloatMap> frames;
  for (int n = 0; std::filesystem::exists(stack_frame_path(prefix, n)); ++n) {
    frames.push_back(load_fpm(stack_frame_path(prefix, n)));
  }
  if (frames.empty()) throw std::runtime_error("no stack frames found at " + stack_frame_path(prefix, 0).string());
  return FringeStack(std::move(frames));
}

void save_stack(const std::filesystem::path& prefix, const FringeStack& stack) {
  for (int n = 0; n < stack.n_steps(); ++n) save_fpm(stack_frame_path(prefix, n), stack.frame(n));
}

}  // namespace fpp
