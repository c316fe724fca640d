// binio.hpp
//
// Little binary buffer reader/writer for snapshot and checkpoint files,
// plus the FNV-1a digest used for file inventories and corruption checks.

#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace onp {

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t k = 0; k < len; ++k) {
    h ^= p[k];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& path);  // digest of a file's bytes

class BinWriter {
 public:
  template <class T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, size_t len) {
    const auto* p = static_cast<const char*>(data);
    buf_.insert(buf_.end(), p, p + len);
  }
  const std::vector<char>& bytes() const { return buf_; }
  uint64_t digest() const { return fnv1a64(buf_.data(), buf_.size()); }
  void write_file(const std::string& path) const;

 private:
  std::vector<char> buf_;
};

class BinReader {
 public:
  explicit BinReader(std::vector<char> buf) : buf_(std::move(buf)) {}
  static BinReader read_file(const std::string& path);

  template <class T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    T v;
    need(sizeof(T));
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void get_bytes(void* out, size_t len) {
    need(len);
    std::memcpy(out, buf_.data() + pos_, len);
    pos_ += len;
  }
  size_t pos() const { return pos_; }
  size_t size() const { return buf_.size(); }
  uint64_t digest_prefix(size_t len) const { return fnv1a64(buf_.data(), len); }

 private:
  void need(size_t len) const {
    if (pos_ + len > buf_.size()) throw std::runtime_error("truncated file");
  }
  std::vector<char> buf_;
  size_t pos_ = 0;
};

}  // namespace onp
