#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdlib>
#include <filesystem>

#include "nbflab/errors.hpp"
#include "nbflab/io.hpp"
#include "nbflab/mlp.hpp"
#include "nbflab/rng.hpp"

using namespace nbflab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nbflab_test_" + std::to_string(Rng(std::random_device{}())()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Snapshot random_snapshot(Rng& rng, int n) {
  Snapshot s;
  s.mach = uniform(rng, 10.0, 30.0);
  s.points.resize(n, 2);
  s.w.resize(n, 4);
  for (Eigen::Index i = 0; i < s.points.size(); ++i)
    s.points.data()[i] = uniform(rng, -4.0, 4.0);
  for (Eigen::Index i = 0; i < s.w.size(); ++i)
    s.w.data()[i] = uniform(rng, -1e7, 1e7);
  return s;
}

}  // namespace

TEST_CASE("checkpoint: save/load reproduces forward outputs bitwise") {
  TempDir tmp;
  MlpNetwork net =
      MlpNetwork::create({2, 7, 5, 3}, Activation::leaky_relu, 0.01, 321);
  const fs::path p = tmp.path / "net.ckpt";
  save_checkpoint(p, net);
  const MlpNetwork back = load_checkpoint(p);

  CHECK(back.layer_sizes == net.layer_sizes);
  CHECK(back.seed == net.seed);
  CHECK(back.hidden_activation == net.hidden_activation);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    CHECK((back.weights[l].array() == net.weights[l].array()).all());
    CHECK((back.biases[l].array() == net.biases[l].array()).all());
  }

  Eigen::VectorXd x(2);
  x << 0.37, -1.4;
  const Eigen::VectorXd y1 = mlp_forward(net, x);
  const Eigen::VectorXd y2 = mlp_forward(back, x);
  CHECK((y1.array() == y2.array()).all());
}

TEST_CASE("checkpoint: bad magic and truncation raise FormatError") {
  MlpNetwork net = MlpNetwork::create({1, 2, 1}, Activation::tanh, 0.01, 5);
  std::string bytes = encode_checkpoint(net);
  std::string corrupted = bytes;
  corrupted[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(corrupted, "c"), FormatError);
  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 3), "t"),
                  FormatError);
  CHECK_THROWS_AS(decode_checkpoint(bytes + "zz", "l"), FormatError);
}

TEST_CASE("snapshot: binary round trip is lossless") {
  Rng rng(12);
  const Snapshot s = random_snapshot(rng, 37);
  const std::string bytes = encode_snapshot(s);
  const Snapshot back = decode_snapshot(bytes, "snap");
  CHECK(back.mach == s.mach);
  CHECK((back.points.array() == s.points.array()).all());
  CHECK((back.w.array() == s.w.array()).all());

  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, 40), "trunc"), FormatError);
}

TEST_CASE("snapshot: CSV mirror agrees with the binary to full precision") {
  Rng rng(13);
  const Snapshot s = random_snapshot(rng, 29);
  const Snapshot back = parse_snapshot_csv(snapshot_csv(s), s.mach, "csv");
  // %.17g print/parse is an exact double round trip
  CHECK((back.points.array() == s.points.array()).all());
  CHECK((back.w.array() == s.w.array()).all());
}

TEST_CASE("write_file_guarded refuses to overwrite differing artifacts") {
  TempDir tmp;
  const fs::path p = tmp.path / "a" / "artifact.bin";
  write_file_guarded(p, "hello", false);
  CHECK(read_file(p) == "hello");
  // identical rewrite is fine
  write_file_guarded(p, "hello", false);
  // differing content requires force
  CHECK_THROWS_AS(write_file_guarded(p, "world", false), DataError);
  write_file_guarded(p, "world", true);
  CHECK(read_file(p) == "world");
}

TEST_CASE("residual history csv") {
  const std::string csv = residual_history_csv({1.5, 0.25});
  CHECK(csv == "iter,residual\n1,1.5\n2,0.25\n");
}
