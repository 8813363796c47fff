#include "frontlab/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace frontlab {

namespace {

constexpr char kMagic[8] = {'F', 'L', 'C', 'K', 'P', 'T', '\0', '\0'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  template <class T>
  void little(T value) {
    std::uint64_t bits = 0;
    if constexpr (std::is_floating_point_v<T>) {
      bits = std::bit_cast<std::uint64_t>(static_cast<double>(value));
    } else {
      bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(std::uint8_t(bits >> (8 * i)));
  }

  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  void bytes(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  template <class T>
  T little() {
    need(sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    if constexpr (std::is_floating_point_v<T>) {
      return std::bit_cast<double>(bits);
    } else {
      return static_cast<T>(bits);
    }
  }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw InvalidInput("checkpoint truncated");
  }

  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const auto& s = ckpt.state;
  const Grid& g = s.q.grid();
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.little<std::uint8_t>(kCheckpointVersion);
  w.little<std::uint8_t>(static_cast<std::uint8_t>(s.q.kind()));
  w.little<std::uint32_t>(std::uint32_t(g.n1()));
  w.little<std::uint32_t>(std::uint32_t(g.n2()));
  w.little<double>(s.t);
  w.little<std::int64_t>(s.step_count);
  w.little<double>(s.u_sup_integral);
  w.little<std::uint32_t>(std::uint32_t(ckpt.config_text.size()));
  w.bytes(ckpt.config_text.data(), ckpt.config_text.size());
  for (double v : s.q.values()) w.little<double>(v);
  return std::move(w.out);
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw InvalidInput("not a frontlab checkpoint");
  const auto version = r.little<std::uint8_t>();
  if (version != kCheckpointVersion) {
    throw InvalidInput("unsupported checkpoint version " + std::to_string(version));
  }
  const auto kind_byte = r.little<std::uint8_t>();
  if (kind_byte > 1) throw InvalidInput("checkpoint carries an unknown field kind");
  const auto n1 = r.little<std::uint32_t>();
  const auto n2 = r.little<std::uint32_t>();
  const Grid grid{static_cast<int>(n1), static_cast<int>(n2)};
  const double t = r.little<double>();
  const auto steps = r.little<std::int64_t>();
  const double integral = r.little<double>();
  const auto len = r.little<std::uint32_t>();
  std::string config(len, '\0');
  r.bytes(config.data(), len);
  std::vector<double> samples(grid.size());
  for (double& v : samples) v = r.little<double>();
  if (!r.at_end()) throw InvalidInput("trailing bytes after checkpoint samples");
  return Checkpoint{
      evolve::SimulationState{t, ScalarField(grid, FieldKind(kind_byte), std::move(samples)), steps,
                              integral},
      std::move(config)};
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = encode_checkpoint(ckpt);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write checkpoint " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace frontlab
