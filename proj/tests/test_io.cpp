#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "doctest.h"
#include "mrmap/io.hpp"
#include "test_support.hpp"

using namespace mrmap;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "mrmap_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  RngStream rng(81, 0);
  PotentialParams params = test_support::random_params(2, 5, 3, rng);
  // Exercise awkward values.
  params.r[0] = 0.1;
  params.r[1] = 1.0 / 3.0;
  params.r[2] = 1e-300;
  TrainConfig tc;
  tc.seed = 123456789;
  tc.lr = 1e-3;

  const fs::path a = temp_dir() / "ck_a.json";
  const fs::path b = temp_dir() / "ck_b.json";
  save_checkpoint(a, params, tc);
  Checkpoint loaded = load_checkpoint(a);
  save_checkpoint(b, loaded.params, loaded.config);
  CHECK(slurp(a) == slurp(b));

  auto fa = flatten_learnables(params);
  auto fb = flatten_learnables(loaded.params);
  REQUIRE(fa.size() == fb.size());
  for (size_t i = 0; i < fa.size(); ++i) CHECK(*fa[i] == *fb[i]);
  CHECK(loaded.config.seed == tc.seed);
  CHECK(loaded.format_version == kCheckpointVersion);
}

TEST_CASE("checkpoint reproduces flow outputs bitwise") {
  PotentialParams params = init_params(4, 16, 5, 0.3, 0.5, 0.2, 3);
  TrainConfig tc;
  tc.q = 16;
  tc.ell = 5;
  const fs::path path = temp_dir() / "ck_flow.json";
  save_checkpoint(path, params, tc);
  Checkpoint loaded = load_checkpoint(path);

  RngStream rng(82, 0);
  Vector x = test_support::random_vector(4, rng);
  ForwardOperator op = ForwardOperator::identity(4);
  LatentDatum datum = make_latent(x, op, 0.2, rng);
  FlowTrajectory t1 = run_flow(params, datum);
  FlowTrajectory t2 = run_flow(loaded.params, datum);
  CHECK(t1.q_vec == t2.q_vec);
  for (size_t j = 0; j < t1.u.size(); ++j) CHECK(t1.u[j] == t2.u[j]);
}

TEST_CASE("checkpoint version mismatch is rejected") {
  const fs::path path = temp_dir() / "ck_bad.json";
  PotentialParams params = init_params(1, 2, 1, 0.1, 1.0, 1.0, 1);
  save_checkpoint(path, params, TrainConfig{});
  nlohmann::json j;
  {
    std::ifstream in(path);
    in >> j;
  }
  j["format_version"] = 999;
  {
    std::ofstream out(path);
    out << j;
  }
  CHECK_THROWS(load_checkpoint(path));
  CHECK_THROWS(load_checkpoint(temp_dir() / "does_not_exist.json"));
}

TEST_CASE("train config json round trip") {
  TrainConfig tc;
  tc.epochs = 7;
  tc.lr = 0.125;
  tc.mask_fraction = 0.3;
  tc.seed = 0xDEADBEEFCAFEull;
  TrainConfig back = train_config_from_json(train_config_to_json(tc));
  CHECK(back.epochs == tc.epochs);
  CHECK(back.lr == tc.lr);
  CHECK(back.mask_fraction == tc.mask_fraction);
  CHECK(back.seed == tc.seed);
  CHECK(back.batch_size == tc.batch_size);
}

TEST_CASE("dataset round trip with metadata") {
  RngStream rng(83, 0);
  Matrix data = test_support::random_matrix(3, 5, rng);
  data(0, 0) = 1.0 / 3.0;
  const fs::path csv = temp_dir() / "data.csv";
  nlohmann::json meta{{"kind", "test"}, {"note", 42}};
  save_dataset(csv, data, meta);
  nlohmann::json meta_back;
  Matrix back = load_dataset(csv, &meta_back);
  CHECK(back.rows == data.rows);
  CHECK(back.cols == data.cols);
  CHECK(back.data == data.data);
  CHECK(meta_back["kind"] == "test");
  CHECK(meta_back["note"] == 42);
}

TEST_CASE("pgm output is deterministic and well formed") {
  Matrix img(2, 3);
  img(0, 0) = 0.0;
  img(0, 1) = 0.5;
  img(0, 2) = 1.0;
  img(1, 0) = 2.0;  // clipped to hi
  const fs::path a = temp_dir() / "a.pgm";
  const fs::path b = temp_dir() / "b.pgm";
  write_pgm(a, img);
  write_pgm(b, img);
  const std::string bytes = slurp(a);
  CHECK(bytes == slurp(b));
  CHECK(bytes.rfind("P2", 0) == 0);
  CHECK(bytes.find("255") != std::string::npos);
}

TEST_CASE("svg scatter output is deterministic") {
  ScatterSeries s;
  s.points = {{0.0, 0.0}, {1.0, 2.0}, {-1.0, 0.5}};
  s.color = "#d62728";
  const fs::path a = temp_dir() / "a.svg";
  const fs::path b = temp_dir() / "b.svg";
  write_svg_scatter(a, {s}, -2.0, 2.0, -2.0, 2.0, "t");
  write_svg_scatter(b, {s}, -2.0, 2.0, -2.0, 2.0, "t");
  const std::string bytes = slurp(a);
  CHECK(bytes == slurp(b));
  CHECK(bytes.find("<svg") != std::string::npos);
}

TEST_CASE("format_double round trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, 2.0, 1e300}) {
    CHECK(std::stod(format_double(v)) == v);
    CHECK(std::stod(format_double(-v)) == -v);
  }
}
