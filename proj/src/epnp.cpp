#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "boxlab/error.hpp"
#include "boxlab/pose.hpp"

// EPnP control-point formulation: express the points as barycentric
// combinations of 4 control points, recover the camera-frame control points
// from the null space of the 2n x 12 projection system, disambiguate the
// null-space mixing coefficients (betas) with the inter-control-point
// distances, then solve the absolute orientation problem.

namespace boxlab {

namespace {

using Matrix12 = Eigen::Matrix<double, 12, 12>;
using Vector12 = Eigen::Matrix<double, 12, 1>;
using MatrixL = Eigen::Matrix<double, 6, 10>;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Vector4 = Eigen::Matrix<double, 4, 1>;

constexpr std::array<std::pair<int, int>, 6> kControlPairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

struct EpnpContext {
  const std::vector<Eigen::Vector3d>& pws;
  const std::vector<Eigen::Vector2d>& us;
  const Intrinsics& K;
  std::array<Eigen::Vector3d, 4> cws;
  Eigen::MatrixXd alphas;  // n x 4
};

bool choose_control_points(EpnpContext* ctx) {
  const auto& pws = ctx->pws;
  const int n = static_cast<int>(pws.size());
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pws) c += p;
  c /= n;
  ctx->cws[0] = c;

  Eigen::Matrix3d moment = Eigen::Matrix3d::Zero();
  for (const auto& p : pws) {
    Eigen::Vector3d d = p - c;
    moment += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(moment);
  for (int k = 1; k < 4; ++k) {
    const double lambda = std::max(eig.eigenvalues()(3 - k), 0.0);
    ctx->cws[k] = c + std::sqrt(lambda / n) * eig.eigenvectors().col(3 - k);
  }
  // Control points must span 3D for the barycentric inversion.
  Eigen::Matrix3d cc;
  for (int k = 0; k < 3; ++k) cc.col(k) = ctx->cws[k + 1] - ctx->cws[0];
  Eigen::FullPivLU<Eigen::Matrix3d> lu(cc);
  if (!lu.isInvertible()) return false;

  const Eigen::Matrix3d cc_inv = lu.inverse();
  ctx->alphas.resize(n, 4);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d a = cc_inv * (pws[i] - ctx->cws[0]);
    ctx->alphas(i, 1) = a(0);
    ctx->alphas(i, 2) = a(1);
    ctx->alphas(i, 3) = a(2);
    ctx->alphas(i, 0) = 1.0 - a.sum();
  }
  return true;
}

Matrix12 fill_mtm(const EpnpContext& ctx) {
  const int n = static_cast<int>(ctx.pws.size());
  Eigen::MatrixXd m(2 * n, 12);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double a = ctx.alphas(i, j);
      m(2 * i, 3 * j + 0) = a * ctx.K.fx;
      m(2 * i, 3 * j + 1) = 0.0;
      m(2 * i, 3 * j + 2) = a * (ctx.K.cx - ctx.us[i].x());
      m(2 * i + 1, 3 * j + 0) = 0.0;
      m(2 * i + 1, 3 * j + 1) = a * ctx.K.fy;
      m(2 * i + 1, 3 * j + 2) = a * (ctx.K.cy - ctx.us[i].y());
    }
  }
  return m.transpose() * m;
}

MatrixL fill_l6x10(const std::array<Vector12, 4>& v) {
  MatrixL l;
  for (int row = 0; row < 6; ++row) {
    const auto [a, b] = kControlPairs[row];
    std::array<Eigen::Vector3d, 4> s;
    for (int k = 0; k < 4; ++k) {
      s[k] = v[k].segment<3>(3 * a) - v[k].segment<3>(3 * b);
    }
    l(row, 0) = s[0].dot(s[0]);
    l(row, 1) = 2.0 * s[0].dot(s[1]);
    l(row, 2) = s[1].dot(s[1]);
    l(row, 3) = 2.0 * s[0].dot(s[2]);
    l(row, 4) = 2.0 * s[1].dot(s[2]);
    l(row, 5) = s[2].dot(s[2]);
    l(row, 6) = 2.0 * s[0].dot(s[3]);
    l(row, 7) = 2.0 * s[1].dot(s[3]);
    l(row, 8) = 2.0 * s[2].dot(s[3]);
    l(row, 9) = s[3].dot(s[3]);
  }
  return l;
}

Vector6 fill_rho(const std::array<Eigen::Vector3d, 4>& cws) {
  Vector6 rho;
  for (int row = 0; row < 6; ++row) {
    const auto [a, b] = kControlPairs[row];
    rho(row) = (cws[a] - cws[b]).squaredNorm();
  }
  return rho;
}

Vector4 betas_approx_1(const MatrixL& l, const Vector6& rho) {
  Eigen::Matrix<double, 6, 4> sub;
  sub << l.col(0), l.col(1), l.col(3), l.col(6);
  Vector4 b = sub.colPivHouseholderQr().solve(rho);
  Vector4 betas;
  if (b(0) < 0) {
    betas(0) = std::sqrt(-b(0));
    for (int k = 1; k < 4; ++k) betas(k) = -b(k) / betas(0);
  } else {
    betas(0) = std::sqrt(b(0));
    for (int k = 1; k < 4; ++k) betas(k) = b(k) / betas(0);
  }
  return betas;
}

Vector4 betas_approx_2(const MatrixL& l, const Vector6& rho) {
  Eigen::Matrix<double, 6, 3> sub;
  sub << l.col(0), l.col(1), l.col(2);
  Eigen::Vector3d b = sub.colPivHouseholderQr().solve(rho);
  Vector4 betas = Vector4::Zero();
  if (b(0) < 0) {
    betas(0) = std::sqrt(-b(0));
    betas(1) = (b(2) < 0) ? std::sqrt(-b(2)) : 0.0;
  } else {
    betas(0) = std::sqrt(b(0));
    betas(1) = (b(2) > 0) ? std::sqrt(b(2)) : 0.0;
  }
  if (b(1) < 0) betas(0) = -betas(0);
  return betas;
}

Vector4 betas_approx_3(const MatrixL& l, const Vector6& rho) {
  Eigen::Matrix<double, 6, 5> sub;
  sub << l.col(0), l.col(1), l.col(2), l.col(3), l.col(4);
  Eigen::Matrix<double, 5, 1> b = sub.colPivHouseholderQr().solve(rho);
  Vector4 betas = Vector4::Zero();
  if (b(0) < 0) {
    betas(0) = std::sqrt(-b(0));
    betas(1) = (b(2) < 0) ? std::sqrt(-b(2)) : 0.0;
  } else {
    betas(0) = std::sqrt(b(0));
    betas(1) = (b(2) > 0) ? std::sqrt(b(2)) : 0.0;
  }
  if (b(1) < 0) betas(0) = -betas(0);
  if (betas(0) != 0.0) betas(2) = b(3) / betas(0);
  return betas;
}

void gauss_newton_betas(const MatrixL& l, const Vector6& rho, Vector4* betas) {
  for (int iter = 0; iter < 5; ++iter) {
    Eigen::Matrix<double, 6, 4> jac;
    Vector6 residual;
    const Vector4& b = *betas;
    for (int row = 0; row < 6; ++row) {
      Eigen::Matrix<double, 10, 1> b10;
      b10 << b(0) * b(0), b(0) * b(1), b(1) * b(1), b(0) * b(2), b(1) * b(2),
          b(2) * b(2), b(0) * b(3), b(1) * b(3), b(2) * b(3), b(3) * b(3);
      residual(row) = rho(row) - l.row(row).dot(b10);
      jac(row, 0) = 2 * l(row, 0) * b(0) + l(row, 1) * b(1) +
                    l(row, 3) * b(2) + l(row, 6) * b(3);
      jac(row, 1) = l(row, 1) * b(0) + 2 * l(row, 2) * b(1) +
                    l(row, 4) * b(2) + l(row, 7) * b(3);
      jac(row, 2) = l(row, 3) * b(0) + l(row, 4) * b(1) +
                    2 * l(row, 5) * b(2) + l(row, 8) * b(3);
      jac(row, 3) = l(row, 6) * b(0) + l(row, 7) * b(1) + l(row, 8) * b(2) +
                    2 * l(row, 9) * b(3);
    }
    *betas += jac.colPivHouseholderQr().solve(residual);
  }
}

CameraPose pose_from_betas(const EpnpContext& ctx,
                           const std::array<Vector12, 4>& v,
                           const Vector4& betas) {
  const int n = static_cast<int>(ctx.pws.size());
  std::array<Eigen::Vector3d, 4> ccs;
  for (int j = 0; j < 4; ++j) {
    ccs[j] = Eigen::Vector3d::Zero();
    for (int k = 0; k < 4; ++k) ccs[j] += betas(k) * v[k].segment<3>(3 * j);
  }
  std::vector<Eigen::Vector3d> pcs(n);
  double depth_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    pcs[i] = Eigen::Vector3d::Zero();
    for (int j = 0; j < 4; ++j) pcs[i] += ctx.alphas(i, j) * ccs[j];
    depth_sum += pcs[i].z();
  }
  if (depth_sum < 0.0) {
    for (auto& p : pcs) p = -p;
  }

  Eigen::Vector3d pc0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d pw0 = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    pc0 += pcs[i];
    pw0 += ctx.pws[i];
  }
  pc0 /= n;
  pw0 /= n;
  Eigen::Matrix3d abt = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) {
    abt += (pcs[i] - pc0) * (ctx.pws[i] - pw0).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      abt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) = -u.col(2);
    r = u * svd.matrixV().transpose();
  }
  CameraPose pose;
  pose.rotation = r;
  pose.translation = pc0 - r * pw0;
  return pose;
}

double mean_reprojection_error(const CameraPose& pose, const EpnpContext& ctx) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ctx.pws.size(); ++i) {
    sum += (project_point(pose, ctx.K, ctx.pws[i]) - ctx.us[i]).norm();
  }
  return sum / static_cast<double>(ctx.pws.size());
}

}  // namespace

std::optional<CameraPose> epnp(const std::vector<Eigen::Vector3d>& points3d,
                               const std::vector<Eigen::Vector2d>& points2d,
                               const Intrinsics& intrinsics) {
  if (points3d.size() < 4 || points3d.size() != points2d.size()) {
    throw Error(ErrorCode::too_few_correspondences,
                "EPnP needs >= 4 paired correspondences");
  }
  EpnpContext ctx{points3d, points2d, intrinsics, {}, {}};
  if (!choose_control_points(&ctx)) return std::nullopt;

  const Matrix12 mtm = fill_mtm(ctx);
  Eigen::SelfAdjointEigenSolver<Matrix12> eig(mtm);
  std::array<Vector12, 4> v;
  for (int k = 0; k < 4; ++k) v[k] = eig.eigenvectors().col(k);

  const MatrixL l = fill_l6x10(v);
  const Vector6 rho = fill_rho(ctx.cws);

  std::array<Vector4, 3> candidates = {betas_approx_1(l, rho),
                                       betas_approx_2(l, rho),
                                       betas_approx_3(l, rho)};
  std::optional<CameraPose> best;
  double best_error = std::numeric_limits<double>::infinity();
  for (auto& betas : candidates) {
    if (!betas.allFinite()) continue;
    gauss_newton_betas(l, rho, &betas);
    if (!betas.allFinite()) continue;
    const CameraPose pose = pose_from_betas(ctx, v, betas);
    if (!pose.rotation.allFinite() || !pose.translation.allFinite()) continue;
    const double error = mean_reprojection_error(pose, ctx);
    if (error < best_error) {
      best_error = error;
      best = pose;
    }
  }
  return best;
}

RansacResult epnp_ransac(const std::vector<Correspondence>& corrs,
                         const Intrinsics& intrinsics,
                         const RansacParams& params, std::mt19937_64& rng) {
  std::vector<int> visible_idx;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (corrs[i].visible) visible_idx.push_back(static_cast<int>(i));
  }
  const int n_vis = static_cast<int>(visible_idx.size());
  if (n_vis < params.min_set) {
    throw Error(ErrorCode::too_few_correspondences,
                "RANSAC needs >= " + std::to_string(params.min_set) +
                    " visible correspondences, got " + std::to_string(n_vis));
  }

  auto count_inliers = [&](const CameraPose& pose, std::vector<bool>* mask,
                           double* mean_error) {
    int count = 0;
    double error_sum = 0.0;
    mask->assign(corrs.size(), false);
    for (int idx : visible_idx) {
      double depth = 0.0;
      const Eigen::Vector2d proj =
          project_point(pose, intrinsics, corrs[idx].point3d, &depth);
      const double err = (proj - corrs[idx].point2d).norm();
      if (depth > 0.0 && err <= params.threshold_px) {
        (*mask)[idx] = true;
        ++count;
        error_sum += err;
      }
    }
    *mean_error = count > 0 ? error_sum / count : 0.0;
    return count;
  };

  RansacResult best;
  best.inliers.assign(corrs.size(), false);
  double best_mean_error = std::numeric_limits<double>::infinity();

  std::vector<Eigen::Vector3d> sample3d(params.min_set);
  std::vector<Eigen::Vector2d> sample2d(params.min_set);
  std::vector<int> pool(visible_idx);

  int required = params.max_iters;
  int iter = 0;
  for (; iter < required && iter < params.max_iters; ++iter) {
    // Partial Fisher-Yates draw of min_set distinct visible indices.
    for (int k = 0; k < params.min_set; ++k) {
      std::uniform_int_distribution<int> dist(k, n_vis - 1);
      std::swap(pool[k], pool[dist(rng)]);
      sample3d[k] = corrs[pool[k]].point3d;
      sample2d[k] = corrs[pool[k]].point2d;
    }
    const auto candidate = epnp(sample3d, sample2d, intrinsics);
    if (!candidate) continue;

    std::vector<bool> mask;
    double mean_error = 0.0;
    const int count = count_inliers(*candidate, &mask, &mean_error);
    if (count > best.inlier_count ||
        (count == best.inlier_count && mean_error < best_mean_error)) {
      best.pose = *candidate;
      best.inliers = mask;
      best.inlier_count = count;
      best_mean_error = mean_error;

      const double w = static_cast<double>(count) / n_vis;
      if (w >= 1.0 - 1e-12) {
        required = iter + 1;
      } else {
        const double denom = std::log1p(-std::pow(w, params.min_set));
        if (denom < 0.0) {
          const double needed =
              std::ceil(std::log(1.0 - params.confidence) / denom);
          required = static_cast<int>(
              std::clamp(needed, 1.0, static_cast<double>(params.max_iters)));
        }
      }
    }
  }
  best.iterations = iter;

  if (best.inlier_count < params.min_set) {
    throw Error(ErrorCode::no_consensus,
                "best consensus set has " + std::to_string(best.inlier_count) +
                    " inliers");
  }

  // Refit on the full consensus set and refresh the inlier mask.
  std::vector<Eigen::Vector3d> in3d;
  std::vector<Eigen::Vector2d> in2d;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (best.inliers[i]) {
      in3d.push_back(corrs[i].point3d);
      in2d.push_back(corrs[i].point2d);
    }
  }
  if (const auto refit = epnp(in3d, in2d, intrinsics)) {
    std::vector<bool> mask;
    double mean_error = 0.0;
    const int count = count_inliers(*refit, &mask, &mean_error);
    if (count >= best.inlier_count) {
      best.pose = *refit;
      best.inliers = mask;
      best.inlier_count = count;
    }
  }
  return best;
}

}  // namespace boxlab
