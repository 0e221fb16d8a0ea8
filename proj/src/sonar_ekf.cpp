// Copyright 2026 The wearnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wearnav/sonar_ekf.hpp"

#include <Eigen/LU>

#include <cmath>

namespace wearnav::sonar
{
namespace
{

bool symmetric_nonneg(const Mat2 & m)
{
  return m.allFinite() && std::abs(m(0, 1) - m(1, 0)) <= 1e-12 &&
         m(0, 0) >= 0.0 && m(1, 1) >= 0.0;
}

void require_initialized(const SonarFusionState & s)
{
  if (!s.initialized) {
    throw Error(ErrorCode::kUsage, "sonar filter used before init");
  }
}

}  // namespace

void SonarFusionConfig::validate() const
{
  if (!symmetric_nonneg(r) || !symmetric_nonneg(q)) {
    throw Error(ErrorCode::kInvalidArgument,
            "sonar R and Q must be symmetric with non-negative diagonals");
  }
  if (!(initial_p_scale > 0.0) || !std::isfinite(initial_p_scale)) {
    throw Error(ErrorCode::kInvalidArgument, "initial_p_scale must be positive");
  }
}

const ProcessModel & ProcessModel::identity()
{
  static const ProcessModel m{
    [](const Vec2 & x) {return x;},
    [](const Vec2 &) {return Mat2::Identity().eval();}};
  return m;
}

const MeasurementModel & MeasurementModel::identity()
{
  static const MeasurementModel m{
    [](const Vec2 & x) {return x;},
    [](const Vec2 &) {return Mat2::Identity().eval();}};
  return m;
}

SonarFusionState init(const Vec2 & z, const SonarFusionConfig & cfg)
{
  cfg.validate();
  if (!(z(0) > 0.0) || !(z(1) > 0.0) || !z.allFinite()) {
    throw Error(ErrorCode::kInvalidMeasurement, "initial sonar ranges must be positive");
  }
  SonarFusionState s;
  s.x = z;
  s.p = cfg.initial_p_scale * Mat2::Identity();
  s.initialized = true;
  return s;
}

SonarFusionState predict(
  const SonarFusionState & s, const SonarFusionConfig & cfg, const ProcessModel & model)
{
  require_initialized(s);
  const Mat2 f = model.jacobian(s.x);
  SonarFusionState out = s;
  out.x = model.f(s.x);
  out.p = f * s.p * f.transpose() + cfg.q;
  out.p = 0.5 * (out.p + out.p.transpose());
  return out;
}

SonarFusionState update(
  const SonarFusionState & s, const Vec2 & z, const SonarFusionConfig & cfg,
  EchoMask valid, const MeasurementModel & model)
{
  require_initialized(s);
  int rows[2];
  int m = 0;
  for (int i = 0; i < 2; ++i) {
    if (!valid[i]) {
      continue;
    }
    if (!(z(i) > 0.0) || !std::isfinite(z(i))) {
      throw Error(ErrorCode::kInvalidMeasurement, "sonar range must be positive");
    }
    rows[m++] = i;
  }
  if (m == 0) {
    return s;
  }

  const Mat2 h_full = model.jacobian(s.x);
  const Vec2 pred_full = model.h(s.x);
  Eigen::MatrixXd h(m, 2);
  Eigen::VectorXd innovation(m);
  Eigen::MatrixXd r(m, m);
  for (int a = 0; a < m; ++a) {
    h.row(a) = h_full.row(rows[a]);
    innovation(a) = z(rows[a]) - pred_full(rows[a]);
    for (int b = 0; b < m; ++b) {
      r(a, b) = cfg.r(rows[a], rows[b]);
    }
  }

  const Eigen::MatrixXd innov_cov = h * s.p * h.transpose() + r;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(innov_cov);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kNumerical, "sonar innovation covariance is singular");
  }
  const Eigen::MatrixXd gain = s.p * h.transpose() * lu.inverse();

  SonarFusionState out = s;
  out.x = s.x + gain * innovation;
  out.p = (Mat2::Identity() - gain * h) * s.p;
  out.p = 0.5 * (out.p + out.p.transpose());
  return out;
}

double fused_distance(const SonarFusionState & s)
{
  require_initialized(s);
  return 0.5 * (s.x(0) + s.x(1));
}

PairFuser::PairFuser(SonarFusionConfig cfg)
: cfg_(std::move(cfg))
{
  cfg_.validate();
}

std::optional<double> PairFuser::step(const Vec2 & z, EchoMask valid)
{
  if (!valid[0] && !valid[1]) {
    state_ = SonarFusionState{};
    return std::nullopt;
  }
  if (!state_.initialized) {
    // A lone echo seeds both components.
    const Vec2 seed(valid[0] ? z(0) : z(1), valid[1] ? z(1) : z(0));
    state_ = init(seed, cfg_);
  } else {
    state_ = update(predict(state_, cfg_), z, cfg_, valid);
  }
  return fused_distance(state_);
}

}  // namespace wearnav::sonar
