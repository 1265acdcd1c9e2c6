#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "tlr/classify.hpp"
#include "tlr/solver.hpp"

using namespace tlr;

namespace {

SolverMatrices random_problem(Eigen::Index m, std::mt19937_64& rng) {
  SolverMatrices mats;
  mats.a = oracle::random_psd(m, rng);
  mats.b = oracle::random_psd(m, rng, 1 + m / 3);
  mats.m = DiagonalMatrix(Vector::Ones(m));
  return mats;
}

JointKernel random_kernel(Eigen::Index n1, Eigen::Index n2, std::mt19937_64& rng) {
  const Matrix s = oracle::random_matrix(n1, 4, rng);
  const Matrix t = oracle::random_matrix(n2, 4, rng);
  return build_joint_kernel(s, t, KernelSpec::rbf());
}

Matrix ib_of(const SolverMatrices& mats) {
  Matrix ib = mats.b;
  ib.diagonal().array() += 1.0;
  return ib;
}

}  // namespace

TEST_CASE("hyperparameter validation") {
  TlrHyperparams h;
  CHECK_NOTHROW(h.validate(11));
  h.alpha = 0;
  CHECK_THROWS(h.validate());
  h.alpha = 1;
  h.beta = -1;
  CHECK_THROWS(h.validate());
  h.beta = 1;
  h.k = 0;
  CHECK_THROWS(h.validate());
  h.k = 5;
  CHECK_THROWS(h.validate(5));
}

TEST_CASE("build_M") {
  const auto m = build_M(1, 1, 2, 3);
  CHECK(m.diagonal()(0) == 2.0);
  CHECK(m.diagonal()(1) == 3.0);
  CHECK(Matrix(build_M(3, 2, 1, 1)) == Matrix::Identity(5, 5));
  CHECK(build_M(4, 7, 0.5, 2.0).diagonal().sum() == doctest::Approx(4 * 0.5 + 7 * 2.0));
}

TEST_CASE("build_AB") {
  SUBCASE("identity kernel") {
    const JointKernel k(Matrix::Identity(3, 3), 2, 1, KernelSpec::linear());
    const auto l = mmd_matrix(2, 1);
    const auto m = build_M(2, 1, 0.3, 0.7);
    const auto mats = build_AB(k, l, m);
    CHECK((mats.a - Matrix(m)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((mats.b - l.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("matches naive triple products") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix k = oracle::random_psd(4, rng);
      const auto l = mmd_matrix(2, 2);
      const auto m = build_M(2, 2, 0.4, 1.7);
      const auto mats = build_AB(k, l.matrix(), m);
      CHECK((mats.a - oracle::naive_triple(k, Matrix(m), k)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((mats.b - oracle::naive_triple(k, l.matrix(), k)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((mats.a - mats.a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("zero weights are rejected before assembly") {
    TlrHyperparams h;
    h.alpha = 0;
    h.beta = 0;
    CHECK_THROWS(h.validate());
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(build_AB(Matrix::Identity(3, 3), mmd_matrix(1, 1).matrix(), build_M(2, 1, 1, 1)),
                    DimensionError);
  }
}

TEST_CASE("solve_W diagonal case") {
  SolverMatrices mats;
  mats.a = Vector(Eigen::Vector3d(3, 2, 1)).asDiagonal();
  mats.b = Matrix::Zero(3, 3);
  const auto p = solve_W(mats, 2);
  CHECK(p.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(p.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(std::abs(p.w(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(p.w(1, 1)) == doctest::Approx(1.0));
  CHECK(p.w(0, 0) > 0);  // sign convention
  CHECK(p.w(1, 1) > 0);
  CHECK(stationarity_residual(p, mats) <= 1e-12);
}

TEST_CASE("solve_W degenerate spectrum is checked by residual") {
  SolverMatrices mats;
  mats.a = Matrix::Identity(5, 5);
  mats.b = Matrix::Zero(5, 5);
  const auto p = solve_W(mats, 3);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(p.eigenvalues(i) == doctest::Approx(1.0));
  CHECK(stationarity_residual(p, mats) <= 1e-12);
  CHECK((p.w.transpose() * p.w - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("solve_W matches the dense (I+B)^-1 A spectrum") {
  std::mt19937_64 rng(23);
  for (Eigen::Index m = 3; m <= 8; ++m) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto mats = random_problem(m, rng);
      const auto p = solve_W(mats, m - 1);
      const auto oracle_values = oracle::dense_spectrum(mats.a, mats.b);
      for (Eigen::Index i = 0; i < m - 1; ++i) {
        CHECK(std::abs(p.eigenvalues(i) - oracle_values[static_cast<std::size_t>(i)]) <=
              1e-6 * std::max(1.0, std::abs(oracle_values[0])));
      }
      // Normalization and ordering invariants.
      const Matrix gram = p.w.transpose() * ib_of(mats) * p.w;
      CHECK((gram - Matrix::Identity(m - 1, m - 1)).cwiseAbs().maxCoeff() <= 1e-6);
      for (Eigen::Index i = 1; i < m - 1; ++i) CHECK(p.eigenvalues(i - 1) >= p.eigenvalues(i));
      CHECK(p.eigenvalues.minCoeff() >= -1e-8);
      // W^T A W is diagonal with the eigenvalues under this normalization.
      const Matrix wtaw = p.w.transpose() * mats.a * p.w;
      CHECK((wtaw - Matrix(p.eigenvalues.asDiagonal())).cwiseAbs().maxCoeff() <=
            1e-8 * std::max(1.0, p.eigenvalues(0)));
    }
  }
}

TEST_CASE("solve_W argument errors") {
  std::mt19937_64 rng(1);
  const auto mats = random_problem(4, rng);
  CHECK_THROWS(solve_W(mats, 0));
  CHECK_THROWS(solve_W(mats, 4));
  SolverMatrices broken = mats;
  broken.b = -10.0 * Matrix::Identity(4, 4);
  CHECK_THROWS_AS(solve_W(broken, 2), NumericalError);
  SolverMatrices wrong = mats;
  wrong.b = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(solve_W(wrong, 2), DimensionError);
}

TEST_CASE("W^T A W = I normalization") {
  std::mt19937_64 rng(41);
  const auto mats = random_problem(6, rng);
  const auto p = solve_W(mats, 3, Normalization::kA);
  const Matrix wtaw = p.w.transpose() * mats.a * p.w;
  CHECK((wtaw - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(stationarity_residual(p, mats) <= 1e-8);

  // Rank-deficient A: trailing eigenvalues are zero, so the literal
  // normalization needs the ridge.
  SolverMatrices singular = mats;
  singular.a = oracle::random_psd(6, rng, 2);
  CHECK_THROWS_AS(solve_W(singular, 4, Normalization::kA), NumericalError);
  const auto ridged = solve_W(singular, 4, Normalization::kA, 1e-6);
  Matrix a_ridge = singular.a;
  a_ridge.diagonal().array() += 1e-6;
  CHECK((ridged.w.transpose() * a_ridge * ridged.w - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <=
        1e-6);
}

TEST_CASE("stationarity residual") {
  std::mt19937_64 rng(51);
  const auto mats = random_problem(8, rng);
  const auto p = solve_W(mats, 4);
  CHECK(stationarity_residual(p, mats) <= 1e-6);
  const Matrix random_w = oracle::random_matrix(8, 4, rng);
  CHECK(stationarity_residual(random_w, p.eigenvalues, mats) > 1e-3);
  CHECK_THROWS_AS(stationarity_residual(random_w, Vector::Ones(3), mats), DimensionError);
}

TEST_CASE("solver maximizes the trace ratio") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mats = random_problem(7, rng);
    const Eigen::Index k = 1 + trial % 4;
    const auto p = solve_W(mats, k);
    const double best = trace_ratio(p.w, mats);
    CHECK(best == doctest::Approx(p.eigenvalues.sum()).epsilon(1e-8));
    for (int r = 0; r < 50; ++r) {
      const Matrix w = oracle::random_c_orthonormal(ib_of(mats), k, rng);
      CHECK(trace_ratio(w, mats) <= best + 1e-9);
    }
  }
}

TEST_CASE("objective examples") {
  SUBCASE("W = 0 collapses to the reconstruction energy") {
    std::mt19937_64 rng(71);
    const auto k = random_kernel(3, 4, rng);
    const auto l = mmd_matrix(3, 4);
    TlrHyperparams h;
    h.alpha = 0.3;
    h.beta = 2.0;
    const Matrix zero = Matrix::Zero(7, 2);
    const double expected = 0.3 * k.source_rows().squaredNorm() + 2.0 * k.target_rows().squaredNorm();
    CHECK(objective_raw(zero, k, l, h) == doctest::Approx(expected).epsilon(1e-12));
    const auto mats = build_AB(k, l, build_M(3, 4, 0.3, 2.0));
    CHECK(objective_expanded(zero, mats) == doctest::Approx(mats.a.trace()).epsilon(1e-12));
  }
  SUBCASE("identity kernel, W = I") {
    const JointKernel k(Matrix::Identity(2, 2), 1, 1, KernelSpec::linear());
    TlrHyperparams h;
    h.alpha = 1;
    h.beta = 1;
    CHECK(objective_raw(Matrix::Identity(2, 2), k, mmd_matrix(1, 1), h) == doctest::Approx(2.0));
  }
  SUBCASE("A = I, B = 0, orthonormal W gives m - k") {
    std::mt19937_64 rng(72);
    SolverMatrices mats;
    mats.a = Matrix::Identity(6, 6);
    mats.b = Matrix::Zero(6, 6);
    const Matrix w = Eigen::HouseholderQR<Eigen::MatrixXd>(oracle::random_matrix(6, 2, rng))
                         .householderQ() *
                     Eigen::MatrixXd::Identity(6, 2);
    CHECK(objective_expanded(w, mats) == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("dimension checks") {
    const JointKernel k(Matrix::Identity(2, 2), 1, 1, KernelSpec::linear());
    TlrHyperparams h;
    CHECK_THROWS_AS(objective_raw(Matrix::Zero(3, 1), k, mmd_matrix(1, 1), h), DimensionError);
  }
}

TEST_CASE("raw and expanded objectives agree") {
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> weight(1e-3, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = random_kernel(4 + trial % 3, 3 + trial % 4, rng);
    const auto l = mmd_matrix(k.n_source(), k.n_target());
    TlrHyperparams h;
    h.alpha = weight(rng);
    h.beta = weight(rng);
    const auto mats = build_AB(k, l, build_M(k.n_source(), k.n_target(), h.alpha, h.beta));
    const Matrix w = oracle::random_matrix(k.size(), 1 + trial % 4, rng);
    CHECK(oracle::rel_err(objective_raw(w, k, l, h), objective_expanded(w, mats)) <= 1e-8);
  }
}

TEST_CASE("joint scaling of alpha and beta leaves the subspace unchanged") {
  std::mt19937_64 rng(91);
  const auto k = random_kernel(6, 5, rng);
  const auto l = mmd_matrix(6, 5);
  const auto base = build_AB(k, l, build_M(6, 5, 0.2, 0.5));
  const auto scaled = build_AB(k, l, build_M(6, 5, 0.2 * 7.0, 0.5 * 7.0));
  CHECK((scaled.b - base.b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((scaled.a - 7.0 * base.a).cwiseAbs().maxCoeff() <= 1e-12 * scaled.a.cwiseAbs().maxCoeff());
  const auto p1 = solve_W(base, 3);
  const auto p2 = solve_W(scaled, 3);
  CHECK(oracle::max_principal_angle(p1.w, p2.w) <= 1e-6);
  CHECK((p2.eigenvalues - 7.0 * p1.eigenvalues).cwiseAbs().maxCoeff() <= 1e-8 * p2.eigenvalues(0));
}

TEST_CASE("ReducedProblem agrees with solve_W") {
  std::mt19937_64 rng(101);
  const auto k = random_kernel(7, 6, rng);
  const auto l = mmd_matrix(7, 6);
  const ReducedProblem reduced(k, l);
  for (double alpha : {1e-3, 0.5}) {
    for (double beta : {1e-2, 1.0}) {
      const auto mats = build_AB(k, l, build_M(7, 6, alpha, beta));
      const auto direct = solve_W(mats, 4);
      const auto fast = reduced.solve(alpha, beta, 4);
      CHECK((direct.eigenvalues - fast.eigenvalues).cwiseAbs().maxCoeff() <=
            1e-8 * std::max(1.0, direct.eigenvalues(0)));
      CHECK(oracle::max_principal_angle(direct.w, fast.w) <= 1e-6);
      CHECK(stationarity_residual(fast, mats) <= 1e-6);
    }
  }
  CHECK_THROWS(reduced.solve(1, 1, 13));
}

TEST_CASE("fit") {
  SUBCASE("shapes") {
    std::mt19937_64 rng(111);
    const DomainPair pair(LabeledMatrix(oracle::random_matrix(20, 6, rng), Labels(20, 0)),
                          LabeledMatrix(oracle::random_matrix(30, 6, rng)));
    TlrHyperparams h;
    h.k = 5;
    const auto r = fit(pair, KernelSpec::linear(), h);
    CHECK(r.latent_source.rows() == 20);
    CHECK(r.latent_source.cols() == 5);
    CHECK(r.latent_target.rows() == 30);
    CHECK(r.latent_target.cols() == 5);
    CHECK(r.model.w.rows() == 50);
    CHECK(r.model.training.rows() == 50);
    // Embedding the training rows reproduces the latent blocks.
    const Matrix embedded = r.model.embed(pair.source.features());
    CHECK((embedded - r.latent_source).cwiseAbs().maxCoeff() <= 1e-9 * (1 + r.latent_source.cwiseAbs().maxCoeff()));
  }
  SUBCASE("identical domains leave no latent gap") {
    std::mt19937_64 rng(112);
    const Matrix x = oracle::random_matrix(12, 4, rng);
    const DomainPair pair(LabeledMatrix(x, Labels(12, 1)), LabeledMatrix(x));
    TlrHyperparams h;
    h.k = 3;
    const auto r = fit(pair, KernelSpec::linear(), h);
    CHECK(mmd_latent(r.latent_source, r.latent_target) <= 1e-10);
  }
  SUBCASE("k out of range") {
    const DomainPair pair(LabeledMatrix(Matrix::Identity(2, 2), Labels{0, 1}),
                          LabeledMatrix(Matrix::Identity(2, 2)));
    TlrHyperparams h;
    h.k = 4;
    CHECK_THROWS(fit(pair, KernelSpec::linear(), h));
  }
  SUBCASE("deterministic") {
    const auto pair = synth_shift_pair(ShiftSpec{10, 5, 3, 30.0, 1.0, 0.5}, 3);
    TlrHyperparams h;
    h.k = 4;
    const auto a = fit(pair, KernelSpec::rbf(), h);
    const auto b = fit(pair, KernelSpec::rbf(), h);
    CHECK(a.model.w == b.model.w);
    CHECK(a.model.eigenvalues == b.model.eigenvalues);
  }
}

TEST_CASE("fit reduces the domain gap relative to random frames") {
  ShiftSpec spec;
  spec.classes = 3;
  spec.n_per_class = 15;
  spec.dim = 6;
  spec.rotation_deg = 30;
  spec.translation = 1.0;
  const auto pair = standardize(synth_shift_pair(spec, 19), ZScoreMode::kPooled);
  TlrHyperparams h;
  h.alpha = 1e-2;
  h.beta = 1e-2;
  h.k = 5;
  const auto r = fit(pair, KernelSpec::linear(), h);
  const double tlr_gap = mmd_latent(r.latent_source, r.latent_target);
  const auto mats = build_AB(r.kernel, mmd_matrix(45, 45), build_M(45, 45, h.alpha, h.beta));
  std::mt19937_64 rng(5);
  for (int draw = 0; draw < 20; ++draw) {
    const Matrix w = oracle::random_c_orthonormal(ib_of(mats), h.k, rng);
    const double random_gap =
        mmd_latent(r.kernel.source_rows() * w, r.kernel.target_rows() * w);
    CHECK(tlr_gap <= random_gap);
  }
}

TEST_CASE("model serialization round-trips bit-exactly") {
  const auto pair = synth_shift_pair(ShiftSpec{8, 4, 2, 10.0, 0.5, 0.3}, 4);
  TlrHyperparams h;
  h.k = 3;
  h.alpha = 0.125;
  h.beta = 1e-5;
  for (const auto& spec : {KernelSpec::linear(), KernelSpec::rbf()}) {
    const auto r = fit(pair, spec, h);
    std::stringstream buffer;
    write_model(r.model, buffer);
    const TlrModel back = read_model(buffer);
    CHECK(back.w == r.model.w);
    CHECK(back.eigenvalues == r.model.eigenvalues);
    CHECK(back.training == r.model.training);
    CHECK(back.hyper.alpha == h.alpha);
    CHECK(back.hyper.beta == h.beta);
    CHECK(back.hyper.k == h.k);
    CHECK(back.kernel.kind == r.model.kernel.kind);
    CHECK(back.kernel.bandwidth == r.model.kernel.bandwidth);
    CHECK(back.n_source == 16);
    CHECK(back.n_target == 16);
    std::stringstream again;
    write_model(back, again);
    CHECK(again.str() == buffer.str());
  }
  std::stringstream junk("NOPE");
  CHECK_THROWS_AS(read_model(junk), Error);
  std::stringstream truncated(std::string("TLRM\x01\0\0\0", 8));
  CHECK_THROWS_AS(read_model(truncated), Error);
}
