#include "tensorfield/baselines.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "tensorfield/rng.hpp"
#include "tensorfield/tensor_ops.hpp"

namespace tensorfield {

namespace {

double green_value(GreenFn g, const std::array<int, 3>& a,
                   const std::array<int, 3>& b) {
  switch (g) {
    case GreenFn::distance: {
      const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      return std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  }
  return 0.0;
}

std::vector<std::array<int, 3>> observed_indices(const ObservationSet& obs) {
  std::vector<std::array<int, 3>> idx;
  idx.reserve(obs.n_observed);
  const auto [di, dj, dk] = obs.o.shape();
  for (int z = 0; z < dk; ++z)
    for (int y = 0; y < dj; ++y)
      for (int x = 0; x < di; ++x)
        if (obs.o(x, y, z) == 1.0) idx.push_back({x, y, z});
  return idx;
}

}  // namespace

SplineModel spline_fit(const ObservationSet& obs, GreenFn green, double ridge) {
  obs.validate();
  if (obs.n_observed < 1)
    throw std::invalid_argument("spline_fit: no observed entries");
  const auto idx = observed_indices(obs);
  const int n = static_cast<int>(idx.size());

  Eigen::MatrixXd g(n, n);
  Eigen::VectorXd rhs(n);
  for (int a = 0; a < n; ++a) {
    rhs(a) = obs.y(idx[a][0], idx[a][1], idx[a][2]);
    for (int b = 0; b < n; ++b) g(a, b) = green_value(green, idx[a], idx[b]);
  }
  const double ridge_eff = ridge >= 0.0 ? ridge : 1e-8 * g.trace() / n;
  Eigen::MatrixXd a = g + ridge_eff * Eigen::MatrixXd::Identity(n, n);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd w = lu.solve(rhs);
  const double resid = (a * w - rhs).norm();
  const double denom = std::max(rhs.norm(), 1e-300);
  if (!(resid / denom < 1e-8))
    throw NumericError(
        "spline_fit: singular Green-function system (relative residual " +
        std::to_string(resid / denom) + ", rcond " +
        std::to_string(lu.rcond()) + "); increase the ridge");

  SplineModel model;
  model.sample_indices = idx;
  model.weights.assign(w.data(), w.data() + n);
  model.green = green;
  model.ridge = ridge_eff;
  return model;
}

double spline_predict(const SplineModel& model, std::array<int, 3> index) {
  double acc = 0.0;
  for (std::size_t n = 0; n < model.weights.size(); ++n)
    acc += model.weights[n] * green_value(model.green, index,
                                          model.sample_indices[n]);
  return acc;
}

Tensor3 spline_predict_grid(const SplineModel& model,
                            std::array<int, 3> shape) {
  Tensor3 out(shape);
  for (int z = 0; z < shape[2]; ++z)
    for (int y = 0; y < shape[1]; ++y)
      for (int x = 0; x < shape[0]; ++x)
        out(x, y, z) = spline_predict(model, {x, y, z});
  return out;
}

namespace {

struct Observed {
  int i, j, k;
  double value;
};

double masked_residual_sq(const std::vector<Observed>& entries,
                          const Tensor3& composed) {
  double acc = 0.0;
  for (const auto& e : entries) {
    const double d = e.value - composed(e.i, e.j, e.k);
    acc += d * d;
  }
  return acc;
}

Eigen::MatrixXd random_orthonormal(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  return q;
}

Matrix to_matrix(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int r = 0; r < e.rows(); ++r)
    for (int c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  return m;
}

}  // namespace

TuckerAlsResult tucker_als_complete(const ObservationSet& obs,
                                    const TuckerAlsConfig& cfg) {
  obs.validate();
  if (obs.n_observed < 1)
    throw std::invalid_argument("tucker_als: no observed entries");
  const auto shape = obs.y.shape();
  for (int p = 0; p < 3; ++p)
    if (cfg.core_dims[p] < 1 || cfg.core_dims[p] > shape[p])
      throw ShapeError("tucker_als: core dims " + shape_str(cfg.core_dims) +
                       " must be within field dims " + shape_str(shape));
  if (cfg.max_sweeps < 1)
    throw std::invalid_argument("tucker_als: max_sweeps must be >= 1");

  std::vector<Observed> entries;
  entries.reserve(obs.n_observed);
  for (int z = 0; z < shape[2]; ++z)
    for (int y = 0; y < shape[1]; ++y)
      for (int x = 0; x < shape[0]; ++x)
        if (obs.o(x, y, z) == 1.0) entries.push_back({x, y, z, obs.y(x, y, z)});

  // per-mode slice membership, for the row-wise factor solves
  std::array<std::vector<std::vector<int>>, 3> slices;
  for (int p = 0; p < 3; ++p) slices[p].resize(shape[p]);
  for (int e = 0; e < static_cast<int>(entries.size()); ++e) {
    slices[0][entries[e].i].push_back(e);
    slices[1][entries[e].j].push_back(e);
    slices[2][entries[e].k].push_back(e);
  }

  Rng rng(cfg.seed);
  std::array<Eigen::MatrixXd, 3> u;
  for (int p = 0; p < 3; ++p)
    u[p] = random_orthonormal(shape[p], cfg.core_dims[p], rng);

  const int r1 = cfg.core_dims[0], r2 = cfg.core_dims[1], r3 = cfg.core_dims[2];
  const int rr = r1 * r2 * r3;
  Tensor3 core(cfg.core_dims);

  TuckerAlsResult result;

  auto factor_matrices = [&] {
    return std::array<Matrix, 3>{to_matrix(u[0]), to_matrix(u[1]),
                                 to_matrix(u[2])};
  };

  auto solve_core = [&] {
    Eigen::MatrixXd a(entries.size(), rr);
    Eigen::VectorXd b(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto& ob = entries[e];
      b(e) = ob.value;
      for (int c = 0; c < r3; ++c)
        for (int bq = 0; bq < r2; ++bq)
          for (int aq = 0; aq < r1; ++aq)
            a(e, aq + r1 * (bq + r2 * c)) =
                u[0](ob.i, aq) * u[1](ob.j, bq) * u[2](ob.k, c);
    }
    Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
    for (int v = 0; v < rr; ++v) core.data()[v] = sol(v);
  };

  for (int p = 0; p < 3; ++p)
    for (int s = 0; s < shape[p]; ++s)
      if (slices[p][s].empty())
        result.warnings.push_back("mode-" + std::to_string(p + 1) + " slice " +
                                  std::to_string(s + 1) +
                                  " has no observations; factor row frozen");

  auto update_factor = [&](int p) {
    const auto fm = factor_matrices();
    // core contracted over the two other modes
    Tensor3 partial = p == 0 ? mode_n_product(mode_n_product(core, fm[1], 2), fm[2], 3)
                    : p == 1 ? mode_n_product(mode_n_product(core, fm[0], 1), fm[2], 3)
                             : mode_n_product(mode_n_product(core, fm[0], 1), fm[1], 2);
    const int rp = cfg.core_dims[p];
    for (int s = 0; s < shape[p]; ++s) {
      const auto& members = slices[p][s];
      if (members.empty()) continue;
      Eigen::MatrixXd a(members.size(), rp);
      Eigen::VectorXd b(members.size());
      for (std::size_t m = 0; m < members.size(); ++m) {
        const auto& ob = entries[members[m]];
        b(m) = ob.value;
        for (int r = 0; r < rp; ++r)
          a(m, r) = p == 0   ? partial(r, ob.j, ob.k)
                    : p == 1 ? partial(ob.i, r, ob.k)
                             : partial(ob.i, ob.j, r);
      }
      u[p].row(s) = a.colPivHouseholderQr().solve(b).transpose();
    }
  };

  solve_core();
  {
    const auto fm = factor_matrices();
    result.residual_history.push_back(masked_residual_sq(
        entries, tucker_compose(core, fm[0], fm[1], fm[2])));
  }

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    for (int p = 0; p < 3; ++p) update_factor(p);
    solve_core();
    const auto fm = factor_matrices();
    const double resid = masked_residual_sq(
        entries, tucker_compose(core, fm[0], fm[1], fm[2]));
    const double prev = result.residual_history.back();
    result.residual_history.push_back(resid);
    result.sweeps = sweep;
    if (std::abs(prev - resid) < cfg.tol * std::max(prev, 1e-300)) break;
  }

  const auto fm = factor_matrices();
  result.x_hat = tucker_compose(core, fm[0], fm[1], fm[2]);
  return result;
}

}  // namespace tensorfield
