// binio.cpp

#include "onperc/binio.hpp"

#include <cstdio>
#include <fstream>

namespace onp {

std::string fnv1a64_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

void BinWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

BinReader BinReader::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto len = static_cast<size_t>(in.tellg());
  in.seekg(0);
  std::vector<char> buf(len);
  in.read(buf.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("read failed: " + path);
  return BinReader(std::move(buf));
}

}  // namespace onp
