#include "nbflab/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nbflab/errors.hpp"

namespace nbflab {

namespace {

static_assert(std::endian::native == std::endian::little,
              "artifact formats are little-endian; big-endian hosts need swaps");

class ByteWriter {
 public:
  void magic(const char m[5]) { buf_.append(m, 4); }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void f64_block(const double* p, std::size_t n) { raw(p, 8 * n); }
  std::string take() { return std::move(buf_); }

 private:
  void raw(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(const std::string& bytes, std::string name)
      : bytes_(bytes), name_(std::move(name)) {}

  void expect_magic(const char m[5]) {
    char got[4];
    raw(got, 4);
    if (std::memcmp(got, m, 4) != 0)
      throw FormatError(name_ + ": bad magic, expected \"" + m + "\"");
  }
  std::uint8_t u8() { std::uint8_t v; raw(&v, 1); return v; }
  std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
  double f64() { double v; raw(&v, 8); return v; }
  void f64_block(double* p, std::size_t n) { raw(p, 8 * n); }
  void expect_end() {
    if (pos_ != bytes_.size())
      throw FormatError(name_ + ": trailing bytes after payload");
  }

 private:
  void raw(void* p, std::size_t n) {
    if (pos_ + n > bytes_.size())
      throw FormatError(name_ + ": truncated file");
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
  }
  const std::string& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_guarded(const std::filesystem::path& path,
                        const std::string& bytes, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) {
    const std::string existing = read_file(path);
    if (existing == bytes) return;
    if (!force)
      throw DataError("refusing to overwrite differing artifact " +
                      path.string() + " (use --force)");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string encode_checkpoint(const MlpNetwork& net) {
  ByteWriter w;
  w.magic("NBF1");
  w.u32(static_cast<std::uint32_t>(net.layer_sizes.size()));
  for (int s : net.layer_sizes) w.u64(static_cast<std::uint64_t>(s));
  w.u8(static_cast<std::uint8_t>(net.hidden_activation));
  w.f64(net.leaky_slope);
  w.u8(0);  // output activation: identity
  w.u64(net.seed);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    // row-major weight block
    const Eigen::MatrixXd& wm = net.weights[l];
    for (Eigen::Index i = 0; i < wm.rows(); ++i)
      for (Eigen::Index j = 0; j < wm.cols(); ++j) w.f64(wm(i, j));
    w.f64_block(net.biases[l].data(),
                static_cast<std::size_t>(net.biases[l].size()));
  }
  return w.take();
}

MlpNetwork decode_checkpoint(const std::string& bytes,
                             const std::string& name) {
  ByteReader r(bytes, name);
  r.expect_magic("NBF1");
  const std::uint32_t n_sizes = r.u32();
  if (n_sizes < 2 || n_sizes > 1024)
    throw FormatError(name + ": implausible layer count");
  MlpNetwork net;
  net.layer_sizes.resize(n_sizes);
  for (auto& s : net.layer_sizes) s = static_cast<int>(r.u64());
  net.hidden_activation = static_cast<Activation>(r.u8());
  net.leaky_slope = r.f64();
  const std::uint8_t out_act = r.u8();
  if (out_act != 0)
    throw FormatError(name + ": unknown output activation id");
  net.seed = r.u64();
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const int rows = net.layer_sizes[l + 1];
    const int cols = net.layer_sizes[l];
    Eigen::MatrixXd wm(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) wm(i, j) = r.f64();
    Eigen::VectorXd b(rows);
    r.f64_block(b.data(), static_cast<std::size_t>(rows));
    net.weights.push_back(std::move(wm));
    net.biases.push_back(std::move(b));
  }
  r.expect_end();
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const MlpNetwork& net,
                     bool force) {
  write_file_guarded(path, encode_checkpoint(net), force);
}

MlpNetwork load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path), path.string());
}

std::string encode_snapshot(const Snapshot& snap) {
  ByteWriter w;
  w.magic("SNAP");
  w.f64(snap.mach);
  w.u64(static_cast<std::uint64_t>(snap.points.rows()));
  for (Eigen::Index i = 0; i < snap.points.rows(); ++i) {
    w.f64(snap.points(i, 0));
    w.f64(snap.points(i, 1));
    for (int k = 0; k < 4; ++k) w.f64(snap.w(i, k));
  }
  return w.take();
}

Snapshot decode_snapshot(const std::string& bytes, const std::string& name) {
  ByteReader r(bytes, name);
  r.expect_magic("SNAP");
  Snapshot snap;
  snap.mach = r.f64();
  const std::uint64_t n = r.u64();
  if (n == 0 || n > (1ULL << 32))
    throw FormatError(name + ": implausible point count");
  snap.points.resize(static_cast<Eigen::Index>(n), 2);
  snap.w.resize(static_cast<Eigen::Index>(n), 4);
  for (std::uint64_t i = 0; i < n; ++i) {
    snap.points(static_cast<Eigen::Index>(i), 0) = r.f64();
    snap.points(static_cast<Eigen::Index>(i), 1) = r.f64();
    for (int k = 0; k < 4; ++k)
      snap.w(static_cast<Eigen::Index>(i), k) = r.f64();
  }
  r.expect_end();
  return snap;
}

void save_snapshot(const std::filesystem::path& path, const Snapshot& snap,
                   bool force, bool csv_mirror) {
  write_file_guarded(path, encode_snapshot(snap), force);
  if (csv_mirror) {
    std::filesystem::path csv = path;
    csv.replace_extension(".csv");
    write_file_guarded(csv, snapshot_csv(snap), force);
  }
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(read_file(path), path.string());
}

std::string snapshot_csv(const Snapshot& snap) {
  std::string out = "x,y,rho,u,v,E\n";
  for (Eigen::Index i = 0; i < snap.points.rows(); ++i) {
    out += g17(snap.points(i, 0));
    out += ',';
    out += g17(snap.points(i, 1));
    for (int k = 0; k < 4; ++k) {
      out += ',';
      out += g17(snap.w(i, k));
    }
    out += '\n';
  }
  return out;
}

Snapshot parse_snapshot_csv(const std::string& text, double mach,
                            const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "x,y,rho,u,v,E")
    throw FormatError(name + ": bad CSV header");
  std::vector<std::array<double, 6>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 6> row;
    const char* p = line.c_str();
    for (int k = 0; k < 6; ++k) {
      char* end = nullptr;
      row[k] = std::strtod(p, &end);
      if (end == p) throw FormatError(name + ": bad CSV number");
      p = end;
      if (k < 5) {
        if (*p != ',') throw FormatError(name + ": expected comma");
        ++p;
      }
    }
    rows.push_back(row);
  }
  Snapshot snap;
  snap.mach = mach;
  snap.points.resize(static_cast<Eigen::Index>(rows.size()), 2);
  snap.w.resize(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    snap.points(static_cast<Eigen::Index>(i), 0) = rows[i][0];
    snap.points(static_cast<Eigen::Index>(i), 1) = rows[i][1];
    for (int k = 0; k < 4; ++k)
      snap.w(static_cast<Eigen::Index>(i), k) = rows[i][2 + k];
  }
  return snap;
}

std::string encode_pod_basis(const PodBasisFile& b) {
  ByteWriter w;
  w.magic("PODB");
  w.u32(b.variable_id);
  w.u64(static_cast<std::uint64_t>(b.mean.size()));
  w.u64(static_cast<std::uint64_t>(b.modes.cols()));
  w.u64(static_cast<std::uint64_t>(b.singular_values.size()));
  w.f64_block(b.mean.data(), static_cast<std::size_t>(b.mean.size()));
  w.f64_block(b.singular_values.data(),
              static_cast<std::size_t>(b.singular_values.size()));
  // column-major mode block matches Eigen's default layout
  w.f64_block(b.modes.data(), static_cast<std::size_t>(b.modes.size()));
  return w.take();
}

PodBasisFile decode_pod_basis(const std::string& bytes,
                              const std::string& name) {
  ByteReader r(bytes, name);
  r.expect_magic("PODB");
  PodBasisFile b;
  b.variable_id = r.u32();
  const std::uint64_t n = r.u64();
  const std::uint64_t n_bf = r.u64();
  const std::uint64_t d = r.u64();
  if (n > (1ULL << 32) || n_bf > n || d > (1ULL << 20))
    throw FormatError(name + ": implausible POD basis header");
  b.mean.resize(static_cast<Eigen::Index>(n));
  r.f64_block(b.mean.data(), n);
  b.singular_values.resize(static_cast<Eigen::Index>(d));
  r.f64_block(b.singular_values.data(), d);
  b.modes.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_bf));
  r.f64_block(b.modes.data(), n * n_bf);
  r.expect_end();
  return b;
}

void save_pod_basis(const std::filesystem::path& path, const PodBasisFile& b,
                    bool force) {
  write_file_guarded(path, encode_pod_basis(b), force);
}

PodBasisFile load_pod_basis(const std::filesystem::path& path) {
  return decode_pod_basis(read_file(path), path.string());
}

std::string residual_history_csv(const std::vector<double>& residuals) {
  std::string out = "iter,residual\n";
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += g17(residuals[i]);
    out += '\n';
  }
  return out;
}

}  // namespace nbflab
