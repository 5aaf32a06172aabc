#include "alphakit/common.hpp"

#include <charconv>

namespace alphakit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(splitmix64(root) ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t stream) {
  return derive_seed(derive_seed(root, fnv1a(tag)), stream);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace alphakit
