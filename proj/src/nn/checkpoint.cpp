#include "imbaug/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "imbaug/error.hpp"

namespace imbaug::nn {
namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(std::span<const double> vs) {
    for (double v : vs) f64(v);
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<double> f64s(std::uint64_t n) {
    need(n * 8);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::uint64_t n) const {
    require(n <= in_.size() - pos_, ErrorKind::format, "checkpoint truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_layer(Writer& w, Layer& layer) {
  w.u8(static_cast<std::uint8_t>(layer.kind()));
  w.u64(layer.in_dim());
  w.u64(layer.out_dim());
  switch (layer.kind()) {
    case LayerKind::dense: {
      auto& d = static_cast<Dense&>(layer);
      w.f64s(d.weight().values());
      w.f64s(d.bias());
      break;
    }
    case LayerKind::batchnorm: {
      auto& b = static_cast<BatchNorm&>(layer);
      w.f64(b.eps());
      w.f64(b.momentum());
      w.f64s(b.gamma());
      w.f64s(b.beta());
      w.f64s(b.running_mean());
      w.f64s(b.running_var());
      break;
    }
    case LayerKind::layernorm: {
      auto& l = static_cast<LayerNorm&>(layer);
      w.f64(l.eps());
      w.f64s(l.gamma());
      w.f64s(l.beta());
      break;
    }
    case LayerKind::leakyrelu: w.f64(static_cast<Activation&>(layer).slope()); break;
    default: break;
  }
}

std::unique_ptr<Layer> read_layer(Reader& r) {
  const auto tag = r.u8();
  const auto in = r.u64();
  const auto out = r.u64();
  require(tag >= 1 && tag <= 7, ErrorKind::format, "unknown layer tag " + std::to_string(tag));
  require(in > 0 && out > 0 && in < (1u << 24) && out < (1u << 24), ErrorKind::format,
          "implausible layer dimensions");
  const auto kind = static_cast<LayerKind>(tag);
  switch (kind) {
    case LayerKind::dense: {
      auto w = r.f64s(in * out);
      auto b = r.f64s(out);
      return std::make_unique<Dense>(Matrix(in, out, std::move(w)), std::move(b));
    }
    case LayerKind::batchnorm: {
      require(in == out, ErrorKind::format, "batchnorm dims differ");
      const double eps = r.f64();
      const double momentum = r.f64();
      auto layer = std::make_unique<BatchNorm>(in, eps, momentum);
      layer->gamma() = r.f64s(in);
      layer->beta() = r.f64s(in);
      layer->running_mean() = r.f64s(in);
      layer->running_var() = r.f64s(in);
      return layer;
    }
    case LayerKind::layernorm: {
      require(in == out, ErrorKind::format, "layernorm dims differ");
      auto layer = std::make_unique<LayerNorm>(in, r.f64());
      layer->gamma() = r.f64s(in);
      layer->beta() = r.f64s(in);
      return layer;
    }
    case LayerKind::leakyrelu:
      require(in == out, ErrorKind::format, "activation dims differ");
      return std::make_unique<Activation>(kind, in, r.f64());
    default:
      require(in == out, ErrorKind::format, "activation dims differ");
      return std::make_unique<Activation>(kind, in);
  }
}

}  // namespace

const Network& Checkpoint::network(std::string_view name) const {
  for (const auto& [n, net] : networks)
    if (n == name) return net;
  fail(ErrorKind::format, "checkpoint has no network named '" + std::string(name) + "'");
}

const std::string& Checkpoint::meta(const std::string& key) const {
  auto it = metadata.find(key);
  require(it != metadata.end(), ErrorKind::format, "checkpoint missing metadata '" + key + "'");
  return it->second;
}

std::string serialize(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    w.str(k);
    w.str(v);
  }
  w.u32(static_cast<std::uint32_t>(ckpt.networks.size()));
  for (const auto& [name, net] : ckpt.networks) {
    w.str(name);
    w.u8(net.mode() == Mode::eval ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(net.layer_count()));
    // Serialization only reads parameters; the const_cast avoids a parallel
    // const accessor set on every layer type.
    auto& mut = const_cast<Network&>(net);
    for (std::size_t i = 0; i < net.layer_count(); ++i) write_layer(w, mut.layer(i));
  }
  return w.take();
}

Checkpoint deserialize(std::string_view bytes) {
  Reader r(bytes);
  require(bytes.size() >= kCheckpointMagic.size() && r.raw(kCheckpointMagic.size()) == kCheckpointMagic,
          ErrorKind::format, "bad checkpoint magic");
  const auto version = r.u32();
  require(version == kCheckpointVersion, ErrorKind::format,
          "unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  const auto n_meta = r.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    auto k = r.str();
    ckpt.metadata[k] = r.str();
  }
  const auto n_net = r.u32();
  for (std::uint32_t i = 0; i < n_net; ++i) {
    auto name = r.str();
    Network net;
    net.set_mode(r.u8() == 1 ? Mode::eval : Mode::train);
    const auto n_layers = r.u32();
    for (std::uint32_t j = 0; j < n_layers; ++j) net.add(read_layer(r));
    ckpt.networks.emplace_back(std::move(name), std::move(net));
  }
  require(r.done(), ErrorKind::format, "trailing bytes after checkpoint");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  const auto bytes = serialize(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorKind::io, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace imbaug::nn
