#include "flowsr/nn/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "flowsr/util/error.hpp"

namespace flowsr::nn {

namespace {

constexpr char kMagic[8] = {'F', 'S', 'R', 'C', 'K', 'P', 'T', '1'};

void put_u32(std::string& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& b, uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& b, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  put_u64(b, u);
}
void put_tensor_data(std::string& b, const Tensor& t) {
  for (int64_t i = 0; i < t.size(); ++i) put_f64(b, t[i]);
}

struct Reader {
  const char* p;
  size_t n;
  size_t pos = 0;
  std::string path;

  void need(size_t k) const {
    if (pos + k > n) throw DataError("corrupt checkpoint (truncated): " + path);
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(p[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(p[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    const uint64_t u = u64();
    double v;
    std::memcpy(&v, &u, 8);
    return v;
  }
  std::string str(size_t len) {
    need(len);
    std::string s(p + pos, len);
    pos += len;
    return s;
  }
  Tensor tensor(const std::vector<int>& shape) {
    Tensor t(shape);
    for (int64_t i = 0; i < t.size(); ++i) t[i] = f64();
    return t;
  }
};

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointData& data) {
  std::string b;
  b.append(kMagic, sizeof(kMagic));
  put_u32(b, 1);  // format version
  put_u64(b, data.seed);
  const std::string cfg = data.config.to_string();
  put_u32(b, static_cast<uint32_t>(cfg.size()));
  b += cfg;
  put_u32(b, static_cast<uint32_t>(data.params.size()));
  for (const auto& [name, tensor] : data.params) {
    put_u32(b, static_cast<uint32_t>(name.size()));
    b += name;
    put_u32(b, static_cast<uint32_t>(tensor.ndim()));
    for (int d = 0; d < tensor.ndim(); ++d) put_u32(b, static_cast<uint32_t>(tensor.dim(d)));
    b.push_back(0);  // dtype: f64
    put_tensor_data(b, tensor);
  }
  b.push_back(data.has_optimizer ? 1 : 0);
  if (data.has_optimizer) {
    if (data.optimizer_m.size() != data.params.size() ||
        data.optimizer_v.size() != data.params.size()) {
      throw ConfigError("checkpoint: optimizer moment count does not match parameters");
    }
    put_u64(b, data.optimizer_step);
    for (const auto& m : data.optimizer_m) put_tensor_data(b, m);
    for (const auto& v : data.optimizer_v) put_tensor_data(b, v);
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint: " + tmp);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
    if (!out) throw DataError("failed writing checkpoint: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw DataError("cannot move checkpoint into place: " + path);
  }
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r{bytes.data(), bytes.size(), 0, path};

  if (r.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw DataError("not a checkpoint file: " + path);
  }
  const uint32_t version = r.u32();
  if (version != 1) {
    throw DataError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  CheckpointData data;
  data.seed = r.u64();
  const uint32_t cfg_len = r.u32();
  data.config = util::KvConfig::from_string(r.str(cfg_len));
  const uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = r.u32();
    std::string name = r.str(name_len);
    const uint32_t ndim = r.u32();
    std::vector<int> shape(ndim);
    for (uint32_t d = 0; d < ndim; ++d) shape[d] = static_cast<int>(r.u32());
    const std::string dtype = r.str(1);
    if (dtype[0] != 0) throw DataError("unsupported checkpoint dtype: " + path);
    data.params.emplace_back(std::move(name), r.tensor(shape));
  }
  const std::string flag = r.str(1);
  data.has_optimizer = flag[0] != 0;
  if (data.has_optimizer) {
    data.optimizer_step = r.u64();
    for (uint32_t i = 0; i < count; ++i) {
      data.optimizer_m.push_back(r.tensor(data.params[i].second.shape()));
    }
    for (uint32_t i = 0; i < count; ++i) {
      data.optimizer_v.push_back(r.tensor(data.params[i].second.shape()));
    }
  }
  return data;
}

}  // namespace flowsr::nn
