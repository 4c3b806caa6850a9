#include "emigrade/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "emigrade/errors.hpp"

namespace emigrade {
namespace {

constexpr char kMagic[4] = {'E', 'M', 'I', 'C'};
constexpr std::uint8_t kVersion = 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u32(out, bits);
}

class ByteReader {
 public:
  ByteReader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(path_ + ": " + what);
  }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail("truncated checkpoint");
  }

  const std::string& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

Checkpoint checkpoint_of(const Network<float>& net, int model_id, std::uint32_t epoch) {
  Checkpoint ckpt;
  ckpt.model_id = model_id;
  ckpt.epoch = epoch;
  for (const LayerState<float>& state : net.states()) {
    if (state.weights.size() == 0) continue;
    ckpt.tensors.push_back(state.weights);
    ckpt.tensors.push_back(state.biases);
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  if (ckpt.model_id < 1 || ckpt.model_id > 255) {
    throw DataError("save_checkpoint: model_id out of range");
  }
  std::string out;
  out.append(kMagic, sizeof kMagic);
  out.push_back(static_cast<char>(kVersion));
  out.push_back(static_cast<char>(ckpt.model_id));
  put_u32(out, ckpt.epoch);
  for (const Tensor<float>& t : ckpt.tensors) {
    if (t.rank() < 1 || t.rank() > 255) throw DataError("save_checkpoint: bad tensor rank");
    out.push_back(static_cast<char>(t.rank()));
    for (int d = 0; d < t.rank(); ++d) put_u32(out, static_cast<std::uint32_t>(t.dim(d)));
    for (int i = 0; i < t.size(); ++i) put_f32(out, t[i]);
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("save_checkpoint: cannot open " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw DataError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("load_checkpoint: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  ByteReader reader(bytes, path);

  char magic[4];
  for (char& c : magic) c = static_cast<char>(reader.u8());
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) reader.fail("not a checkpoint file");
  if (reader.u8() != kVersion) reader.fail("unsupported checkpoint version");

  Checkpoint ckpt;
  ckpt.model_id = reader.u8();
  ckpt.epoch = reader.u32();
  while (!reader.exhausted()) {
    const int rank = reader.u8();
    if (rank < 1) reader.fail("tensor rank must be positive");
    Shape shape(rank);
    std::int64_t count = 1;
    for (int d = 0; d < rank; ++d) {
      const std::uint32_t extent = reader.u32();
      if (extent == 0 || extent > (1u << 28)) reader.fail("implausible tensor extent");
      shape[d] = static_cast<int>(extent);
      count *= extent;
      if (count > (1LL << 31)) reader.fail("implausible tensor size");
    }
    Tensor<float> t(shape);
    for (int i = 0; i < t.size(); ++i) t[i] = reader.f32();
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

void apply_checkpoint(Network<float>& net, const Checkpoint& ckpt) {
  std::vector<LayerState<float>>& states = net.states();
  std::size_t next = 0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    LayerState<float>& state = states[s];
    if (state.weights.size() == 0) continue;
    for (Tensor<float>* param : {&state.weights, &state.biases}) {
      if (next >= ckpt.tensors.size()) {
        throw DataError("apply_checkpoint: checkpoint has too few tensors for model " +
                        std::to_string(ckpt.model_id));
      }
      const Tensor<float>& stored = ckpt.tensors[next];
      if (!param->same_shape(stored)) {
        throw DataError("apply_checkpoint: tensor " + std::to_string(next) + " has shape " +
                        shape_to_string(stored.shape()) + " but layer " + std::to_string(s) +
                        " expects " + shape_to_string(param->shape()));
      }
      *param = stored;
      ++next;
    }
  }
  if (next != ckpt.tensors.size()) {
    throw DataError("apply_checkpoint: checkpoint has " + std::to_string(ckpt.tensors.size()) +
                    " tensors but the model needs " + std::to_string(next));
  }
}

}  // namespace emigrade
