// Exercises the shared library through its C header only.
#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wlra/wlra.h"

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

wlra_problem* synthetic(uint64_t seed) {
  wlra_synthetic_params p;
  wlra_synthetic_defaults(&p);
  p.seed = seed;
  wlra_problem* out = nullptr;
  EXPECT_EQ(wlra_problem_synthetic(&p, &out), WLRA_OK);
  return out;
}

}  // namespace

TEST(CApi, SyntheticDimsAndRoundTrip) {
  wlra_problem* p = synthetic(0);
  int64_t m = 0, n = 0, nnz = 0;
  ASSERT_EQ(wlra_problem_dims(p, &m, &n, &nnz), WLRA_OK);
  EXPECT_EQ(m, 50);
  EXPECT_EQ(n, 20);
  EXPECT_GT(nnz, 0);
  const std::string path = temp_path("wlra_capi_rt.csv");
  ASSERT_EQ(wlra_problem_write_triplets(p, path.c_str()), WLRA_OK);
  wlra_problem* q = nullptr;
  ASSERT_EQ(wlra_problem_load_triplets(path.c_str(), 0, m, n, &q), WLRA_OK);
  int64_t m2, n2, nnz2;
  wlra_problem_dims(q, &m2, &n2, &nnz2);
  EXPECT_EQ(nnz2, nnz);
  wlra_problem_free(q);
  wlra_problem_free(p);
  std::remove(path.c_str());
}

TEST(CApi, ErrorsAreReported) {
  wlra_problem* q = nullptr;
  EXPECT_EQ(wlra_problem_load_triplets("/nonexistent.csv", 0, 0, 0, &q), WLRA_ERR_IO);
  EXPECT_NE(std::string(wlra_last_error()).find("nonexistent"), std::string::npos);
  EXPECT_EQ(q, nullptr);
  EXPECT_EQ(wlra_problem_load_triplets(nullptr, 0, 0, 0, &q), WLRA_ERR_NULL_ARGUMENT);
  EXPECT_STRNE(wlra_status_string(WLRA_ERR_PARSE), "");

  const std::string path = temp_path("wlra_capi_bad.csv");
  {
    std::ofstream out(path);
    out << "row,col,value\n0,0,1\n0,0,2\n";
  }
  EXPECT_EQ(wlra_problem_load_triplets(path.c_str(), 0, 0, 0, &q), WLRA_ERR_DUPLICATE_ENTRY);
  std::remove(path.c_str());
}

TEST(CApi, AlgorithmNames) {
  wlra_algorithm a;
  ASSERT_EQ(wlra_algorithm_from_string("als-euclidean", &a), WLRA_OK);
  EXPECT_EQ(a, WLRA_ALS_EUCLIDEAN);
  EXPECT_STREQ(wlra_algorithm_name(WLRA_SGD_PW), "sgd-pw");
  EXPECT_EQ(wlra_algorithm_from_string("nope", &a), WLRA_ERR_INVALID_ARGUMENT);
  EXPECT_DOUBLE_EQ(wlra_iota_preset(1e-2), 108.0 / 270000.0);
  EXPECT_EQ(wlra_bigK_preset(WLRA_SGD_MANIFOLD, 1e-2), 1e3);
}

TEST(CApi, InitSvd) {
  wlra_problem* p = synthetic(1);
  std::vector<double> x(3), U(50 * 3), V(20 * 3);
  double cost = -1;
  ASSERT_EQ(wlra_init_svd(p, 3, x.data(), U.data(), V.data(), &cost), WLRA_OK);
  EXPECT_GE(x[0], x[1]);
  EXPECT_GE(x[1], x[2]);
  EXPECT_GT(cost, 0.0);
  double col0 = 0;
  for (int i = 0; i < 50; ++i) col0 += U[i] * U[i];
  EXPECT_NEAR(col0, 1.0, 1e-12);
  EXPECT_EQ(wlra_init_svd(p, 0, nullptr, nullptr, nullptr, nullptr), WLRA_ERR_INVALID_DIMENSIONS);
  wlra_problem_free(p);
}

TEST(CApi, RunAndCompare) {
  wlra_problem* p = synthetic(2);
  wlra_experiment e;
  wlra_experiment_defaults(&e);
  e.algorithm = WLRA_SGD_MANIFOLD;
  e.k = 3;
  e.has_lambda = 1;
  e.lambda = 1e-2;
  e.has_bigK = 1;
  e.bigK = 1;
  e.max_iterations = 100;
  e.deterministic = 1;
  wlra_trace* t1 = nullptr;
  ASSERT_EQ(wlra_run(p, &e, &t1), WLRA_OK) << wlra_last_error();
  EXPECT_EQ(wlra_trace_size(t1), 11u);
  wlra_trace_row row;
  ASSERT_EQ(wlra_trace_row_at(t1, 10, &row), WLRA_OK);
  EXPECT_EQ(row.t, 100);
  EXPECT_EQ(row.has_objective, 1);
  EXPECT_EQ(wlra_trace_row_at(t1, 11, &row), WLRA_ERR_INDEX_OUT_OF_BOUNDS);

  e.algorithm = WLRA_ALS_MANIFOLD;
  e.max_iterations = 10;
  e.name = "ls";
  wlra_trace* t2 = nullptr;
  ASSERT_EQ(wlra_run(p, &e, &t2), WLRA_OK) << wlra_last_error();
  ASSERT_EQ(wlra_trace_row_at(t2, 0, &row), WLRA_OK);
  EXPECT_EQ(row.has_grad_norm, 1);

  const std::string a = temp_path("wlra_capi_a.csv"), b = temp_path("wlra_capi_b.csv");
  ASSERT_EQ(wlra_trace_write_csv(t1, a.c_str()), WLRA_OK);
  ASSERT_EQ(wlra_trace_write_csv(t1, b.c_str()), WLRA_OK);
  EXPECT_EQ(slurp(a), slurp(b));
  const wlra_trace* both[] = {t1, t2};
  ASSERT_EQ(wlra_compare_write_csv(both, 2, WLRA_ALIGN_ITERATION, 0.1, 0, a.c_str()), WLRA_OK);
  EXPECT_EQ(slurp(a).substr(0, 20), "t,sgd-manifold,ls\n0,");

  e.lambda = -1;
  wlra_trace* bad = nullptr;
  EXPECT_EQ(wlra_run(p, &e, &bad), WLRA_ERR_LAMBDA_OUT_OF_RANGE);
  e.lambda = 1e-2;
  e.max_seconds = 1.0;  // both budgets set
  EXPECT_EQ(wlra_run(p, &e, &bad), WLRA_ERR_INVALID_ARGUMENT);

  wlra_trace_free(t1);
  wlra_trace_free(t2);
  wlra_problem_free(p);
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(CApi, SampleSubmatrix) {
  wlra_problem* p = synthetic(3);
  wlra_problem* s = nullptr;
  ASSERT_EQ(wlra_problem_sample(p, 10, 5, 4, &s), WLRA_OK);
  int64_t m, n, nnz;
  wlra_problem_dims(s, &m, &n, &nnz);
  EXPECT_EQ(m, 10);
  EXPECT_EQ(n, 5);
  EXPECT_EQ(wlra_problem_sample(p, 100, 5, 4, &s), WLRA_ERR_INVALID_DIMENSIONS);
  wlra_problem_free(s);
  wlra_problem_free(p);
  wlra_problem_free(nullptr);
}
