#include "learn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "common/errors.hpp"

namespace ssilkc::learn {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("checkpoint: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f32(std::istream& in) { return static_cast<double>(std::bit_cast<float>(get_u32(in))); }

std::uint8_t get_u8(std::istream& in) {
  char c;
  if (!in.get(c)) throw IoError("checkpoint: truncated file");
  return static_cast<std::uint8_t>(c);
}

}  // namespace

void write_checkpoint(std::ostream& out, const MLP& net) {
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  out.put(static_cast<char>(kCheckpointVersion));
  put_u32(out, static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& l : net.layers()) {
    put_u32(out, static_cast<std::uint32_t>(l.in_size()));
    put_u32(out, static_cast<std::uint32_t>(l.out_size()));
    out.put(static_cast<char>(l.activation));
  }
  for (const auto& l : net.layers()) {
    for (int r = 0; r < l.out_size(); ++r)
      for (int c = 0; c < l.in_size(); ++c) put_f32(out, l.weight(r, c));
    for (int r = 0; r < l.out_size(); ++r) put_f32(out, l.bias[r]);
  }
  if (!out) throw IoError("checkpoint: write failed");
}

MLP read_checkpoint(std::istream& in) {
  char magic[sizeof kCheckpointMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw IoError("checkpoint: bad magic");
  const std::uint8_t version = get_u8(in);
  if (version != kCheckpointVersion) throw IoError("checkpoint: unsupported version");
  const std::uint32_t n = get_u32(in);
  if (n == 0 || n > 64) throw IoError("checkpoint: implausible layer count");
  std::vector<int> sizes;
  std::vector<Activation> acts;
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto in_size = static_cast<int>(get_u32(in));
    const auto out_size = static_cast<int>(get_u32(in));
    const std::uint8_t act = get_u8(in);
    if (act > static_cast<std::uint8_t>(Activation::Softplus)) throw IoError("checkpoint: bad activation");
    if (k == 0) sizes.push_back(in_size);
    else if (sizes.back() != in_size) throw IoError("checkpoint: inconsistent layer shapes");
    sizes.push_back(out_size);
    acts.push_back(static_cast<Activation>(act));
  }
  MLP net = MLP::zeros(sizes, Activation::Identity, Activation::Identity);
  for (std::uint32_t k = 0; k < n; ++k) net.layers()[k].activation = acts[k];
  for (auto& l : net.layers()) {
    for (int r = 0; r < l.out_size(); ++r)
      for (int c = 0; c < l.in_size(); ++c) l.weight(r, c) = get_f32(in);
    for (int r = 0; r < l.out_size(); ++r) l.bias[r] = get_f32(in);
  }
  return net;
}

void save_checkpoint(const std::string& path, const MLP& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path);
  write_checkpoint(out, net);
}

MLP load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

}  // namespace ssilkc::learn
