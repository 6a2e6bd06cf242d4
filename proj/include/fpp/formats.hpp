// Containers shared by every stage of the pipeline, and the on-disk formats
// used to exchange them with external tools:
//
//   .fpm   "FPM1\n<width> <height>\n" + width*height binary32, little-endian,
//          row-major, top-left origin.
//   .pgm   binary PGM "P5\n<width> <height>\n255\n" + one byte per point,
//          restricted to the label values 0/1/2.
//   .k16   "K16\n<width> <height>\n" + width*height int16, little-endian,
//          row-major. Sidecar for integer fringe-order maps.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpp {

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) throw std::invalid_argument("negative grid dimension");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  Pixel pixel(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  template <class U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Boolean per-point mask; nonzero means set.
using Mask = Grid<std::uint8_t>;
/// Integer fringe-order map.
using OrderMap = Grid<std::int32_t>;

enum class Label : std::uint8_t { Background = 0, Unreliable = 1, Reliable = 2 };
using LabelMap = Grid<Label>;

/// Real-valued map with a per-point validity flag. Invalid points hold 0.
class FloatMap {
 public:
  FloatMap() = default;
  FloatMap(int width, int height, double fill = 0.0)
      : values_(width, height, fill), valid_(width, height, 1) {}

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  bool contains(int x, int y) const { return values_.contains(x, y); }
  std::size_t index(int x, int y) const { return values_.index(x, y); }
  Pixel pixel(std::size_t i) const { return values_.pixel(i); }

  double& operator()(int x, int y) { return values_(x, y); }
  double operator()(int x, int y) const { return values_(x, y); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool valid(std::size_t i) const { return valid_[i] != 0; }
  bool valid(int x, int y) const { return valid_(x, y) != 0; }
  /// Marks a point invalid and zeroes its value.
  void invalidate(std::size_t i) {
    valid_[i] = 0;
    values_[i] = 0.0;
  }
  void set_valid(std::size_t i, bool v) { valid_[i] = v ? 1 : 0; }

  std::span<double> values() { return values_.data(); }
  std::span<const double> values() const { return values_.data(); }
  const Mask& validity() const { return valid_; }
  std::size_t valid_count() const;

  /// Invalidates every point whose mask entry is zero.
  void restrict_to(const Mask& mask);

  template <class U>
  bool same_shape(const Grid<U>& other) const {
    return values_.same_shape(other);
  }
  bool same_shape(const FloatMap& other) const { return values_.same_shape(other.values_); }

  friend bool operator==(const FloatMap&, const FloatMap&) = default;

 private:
  Grid<double> values_;
  Mask valid_;
};

/// N co-registered phase-shifted intensity frames of one scan.
class FringeStack {
 public:
  FringeStack() = default;
  explicit FringeStack(std::vector<FloatMap> frames);

  int n_steps() const { return static_cast<int>(frames_.size()); }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }
  const FloatMap& frame(int n) const { return frames_.at(static_cast<std::size_t>(n)); }
  const std::vector<FloatMap>& frames() const { return frames_; }

 private:
  std::vector<FloatMap> frames_;
};

/// Normalized phase, modulation and background intensity, all in [0, 1].
struct PMIImage {
  FloatMap phase;
  FloatMap modulation;
  FloatMap intensity;
};

enum class FringeDirection { Vertical, Horizontal };

class DecodeError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, BadHeader, LengthMismatch, NonFinite, InvalidLabel, OutOfRange };
  DecodeError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

Bytes encode_fpm(const FloatMap& map);
FloatMap decode_fpm(std::span<const std::uint8_t> bytes);

Bytes encode_labelmap(const LabelMap& labels);
LabelMap decode_labelmap(std::span<const std::uint8_t> bytes);

Bytes encode_order_map(const OrderMap& orders);
OrderMap decode_order_map(std::span<const std::uint8_t> bytes);

/// Validity as a label map: 2 where valid, 0 elsewhere.
LabelMap validity_to_labels(const Mask& valid);
Mask labels_to_validity(const LabelMap& labels);

Bytes read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

FloatMap load_fpm(const std::filesystem::path& path);
void save_fpm(const std::filesystem::path& path, const FloatMap& map);
LabelMap load_labelmap(const std::filesystem::path& path);
void save_labelmap(const std::filesystem::path& path, const LabelMap& labels);
OrderMap load_order_map(const std::filesystem::path& path);
void save_order_map(const std::filesystem::path& path, const OrderMap& orders);

/// Stack frame path: "<prefix>_NN.fpm" with a zero-padded two-digit index.
std::filesystem::path stack_frame_path(const std::filesystem::path& prefix, int index);
FringeStack load_stack(const std::filesystem::path& prefix);
void save_stack(const std::filesystem::path& prefix, const FringeStack& stack);

}  // namespace fpp
