#include "tstruct/serialization.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "test_support.hpp"
#include "tstruct/errors.hpp"

namespace tstruct {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tstruct_serialization_" + name);
  fs::remove_all(p);
  return p;
}

TEST(FormatDouble, DecimalNotationRoundTrips) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(3.0), "3");
  EXPECT_EQ(format_double(1e-7), "0.0000001");
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = standard_normal(rng) * std::pow(10.0, uniform(rng, -8, 8));
    const std::string s = format_double(v);
    EXPECT_EQ(s.find('e'), std::string::npos);
    EXPECT_EQ(std::stod(s), v);
  }
}

TEST(Csv, RoundTripIsExact) {
  Rng rng(2);
  const Matrix x = testing::random_matrix(40, 4, -100, 100, rng);
  const std::string text = matrix_to_csv(x);
  EXPECT_EQ(text.rfind("x1,x2,x3,x4\n", 0), 0u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(matrix_from_csv(text), x);
}

TEST(Csv, RejectsMalformed) {
  EXPECT_THROW(matrix_from_csv("x1,x2\n1,2\n3\n"), InvalidInput);
  EXPECT_THROW(matrix_from_csv("x1,x2\n1,abc\n"), InvalidInput);
  EXPECT_THROW(matrix_from_csv(""), InvalidInput);
  EXPECT_THROW(matrix_from_csv("x1,x2\n1,nan\n"), InvalidInput);
  // CRLF input and a missing trailing newline are accepted.
  EXPECT_EQ(matrix_from_csv("x1,x2\r\n1,2\r\n3,4").rows(), 2);
}

TEST(Files, MissingFileIsIoError) {
  try {
    read_file("/nonexistent/tstruct/data.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), "/nonexistent/tstruct/data.csv");
  }
}

TEST(Files, AtomicWriteCreatesParentsAndReplaces) {
  const fs::path dir = scratch_dir("atomic");
  const std::string path = (dir / "a" / "b.json").string();
  write_json_file(path, Json{{"x", 1}});
  write_json_file(path, Json{{"x", 2}});
  EXPECT_EQ(read_json_file(path).at("x"), 2);
  for (const auto& entry : fs::directory_iterator(dir / "a")) EXPECT_EQ(entry.path().filename(), "b.json");
  fs::remove_all(dir);
}

TEST(Files, UnwritablePathIsIoError) {
  const fs::path dir = scratch_dir("blocked");
  fs::create_directories(dir);
  write_file_atomic((dir / "file").string(), "x");
  // A regular file where a directory is needed.
  EXPECT_THROW(write_file_atomic((dir / "file" / "child.txt").string(), "y"), IoError);
  fs::remove_all(dir);
}

TEST(Json, InvalidDocumentIsInvalidInput) {
  const fs::path dir = scratch_dir("badjson");
  write_file_atomic((dir / "x.json").string(), "{not json");
  EXPECT_THROW(read_json_file((dir / "x.json").string()), InvalidInput);
  fs::remove_all(dir);
}

TEST(Json, GraphFormats) {
  const BinaryDag g = BinaryDag::from_edges(3, {{0, 2}, {1, 2}});
  const Json j = dag_to_json(g);
  EXPECT_EQ(j.dump(), R"({"d":3,"edges":[[0,2],[1,2]]})");
  EXPECT_EQ(dag_from_json(j), g);
  EXPECT_THROW(dag_from_json(Json::parse(R"({"d":2,"edges":[[0,1],[1,0]]})")), InvalidInput);
  EXPECT_THROW(graph_from_json(Json::parse(R"({"d":2,"edges":[[0,5]]})")), InvalidInput);
  EXPECT_THROW(graph_from_json(Json::parse(R"({"edges":[]})")), InvalidInput);
}

TEST(Json, SemRoundTrip) {
  Rng rng(3);
  const SemSystem sem = sample_index_model(sample_er_dag(4, 4, rng), rng, 0.7);
  const SemSystem back = sem_from_json(sem_to_json(sem));
  EXPECT_EQ(back.dag, sem.dag);
  for (int m = 0; m < 3; ++m) EXPECT_EQ(back.theta[m], sem.theta[m]);
  EXPECT_EQ(back.noise_scale, 0.7);
}

TEST(Json, PartitionRoundTrip) {
  SubsetPartition p;
  p.K = 2;
  p.permutation = {2, 0, 1};
  p.index_sets = {{0, 1}, {1, 2}};
  p.seed = 18446744073709551615ULL;
  const SubsetPartition back = partition_from_json(partition_to_json(p));
  EXPECT_EQ(back.permutation, p.permutation);
  EXPECT_EQ(back.index_sets, p.index_sets);
  EXPECT_EQ(back.seed, p.seed);
}

TEST(Json, ModelRoundTripIsExact) {
  ModelSpec spec;
  spec.K = 2;
  spec.forbidden = {{0, 3}};
  DStructModel m = make_model(spec, 5);
  Rng rng(4);
  for (auto& l : m.learners) {
    for (Eigen::Index i = 0; i < l.params.size(); ++i) l.params.values()(i) = standard_normal(rng) / 3.0;
  }
  m.learners[1].rho = 1e6;
  m.learners[1].lambda2 = 0.123456789012345;
  m.learners[1].h_prev = 3.2e-9;
  const DStructModel back = model_from_json(Json::parse(model_to_json(m).dump()));
  ASSERT_EQ(back.K(), 2);
  EXPECT_EQ(back.forbidden, m.forbidden);
  EXPECT_EQ(back.alpha, m.alpha);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(back.learners[k].params.values(), m.learners[k].params.values());
    EXPECT_EQ(back.learners[k].rho, m.learners[k].rho);
    EXPECT_EQ(back.learners[k].lambda2, m.learners[k].lambda2);
    EXPECT_EQ(back.learners[k].init_seed, m.learners[k].init_seed);
  }
  EXPECT_TRUE(std::isinf(back.learners[0].h_prev));
  EXPECT_EQ(back.learners[1].h_prev, 3.2e-9);
}

TEST(Json, TrainingLogIsJsonLines) {
  StepRecord a;
  a.epoch = 1;
  a.k = 2;
  a.h = 0.5;
  const std::string text = log_to_jsonl({a, a});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  const Json first = Json::parse(text.substr(0, text.find('\n')));
  for (const char* key : {"epoch", "k", "h", "rho_k", "lambda2_k", "objective", "l_mse"}) {
    EXPECT_TRUE(first.contains(key)) << key;
  }
}

}  // namespace
}  // namespace tstruct
