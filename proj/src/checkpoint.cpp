#include "gcsl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "gcsl/mlp.hpp"

namespace gcsl {

namespace {

constexpr char kMagic[5] = {'G', 'C', 'S', 'L', '1'};

void put_i32(std::ostream& os, std::int32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (unsigned char)((std::uint32_t)v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::int32_t get_i32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("checkpoint: truncated");
  std::uint32_t u = 0;
  for (int i = 0; i < 4; ++i) u |= (std::uint32_t)b[i] << (8 * i);
  return (std::int32_t)u;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("checkpoint: truncated");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= (std::uint64_t)b[i] << (8 * i);
  return std::bit_cast<double>(u);
}

}  // namespace

void save_checkpoint(const Policy& policy, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  os.write(kMagic, 5);

  if (const auto* mlp = dynamic_cast<const MlpPolicy*>(&policy)) {
    os.put('M');
    const FeatureCodec& c = mlp->codec();
    put_i32(os, c.state_dim);
    put_i32(os, c.one_hot_states);
    put_i32(os, c.horizon_len);
    const MlpParams& p = mlp->params();
    put_i32(os, (std::int32_t)p.dims.size());
    for (int d : p.dims) put_i32(os, d);
    for (double v : p.flat) put_f64(os, v);
  } else if (const auto* tab = dynamic_cast<const TabularPolicy*>(&policy)) {
    os.put('T');
    put_i32(os, tab->states());
    put_i32(os, tab->action_count());
    put_i32(os, tab->horizons());
    put_f64(os, tab->smoothing());
    for (double v : tab->counts()) put_f64(os, v);
  } else {
    throw std::invalid_argument("checkpoint: unsupported policy type");
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::unique_ptr<Policy> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[5];
  if (!is.read(magic, 5) || !std::equal(magic, magic + 5, kMagic))
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const int kind = is.get();

  if (kind == 'M') {
    FeatureCodec c;
    c.state_dim = get_i32(is);
    c.one_hot_states = get_i32(is);
    c.horizon_len = get_i32(is);
    const int n_dims = get_i32(is);
    if (n_dims < 2 || n_dims > 64) throw std::runtime_error("checkpoint: bad layer count");
    std::vector<int> dims(n_dims);
    for (int& d : dims) {
      d = get_i32(is);
      if (d <= 0) throw std::runtime_error("checkpoint: bad layer dimension");
    }
    MlpParams p = MlpParams::zeros(dims);
    for (double& v : p.flat) v = get_f64(is);
    return std::make_unique<MlpPolicy>(c, std::move(p));
  }
  if (kind == 'T') {
    const int states = get_i32(is);
    const int actions = get_i32(is);
    const int horizons = get_i32(is);
    const double smoothing = get_f64(is);
    auto tab = std::make_unique<TabularPolicy>(states, actions, horizons, smoothing);
    for (double& v : tab->counts()) v = get_f64(is);
    return tab;
  }
  throw std::runtime_error("checkpoint: unknown policy kind");
}

}  // namespace gcsl
