// Copyright 2026 The Laika Spine Authors
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

#ifndef LAIKA_RIGID_HPP
#define LAIKA_RIGID_HPP

#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "laika/structure.hpp"

namespace laika {

template <typename Scalar>
struct RigidTransform {
  Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();

  Vector3<Scalar> operator()(const Vector3<Scalar>& p) const { return rotation * p + translation; }
};

/// Mass-weighted least-squares rigid transform mapping `reference` onto
/// `current` (Kabsch). Columns are points; `weights` holds one mass per column.
template <typename Scalar, typename RefDerived, typename CurDerived, typename WDerived>
RigidTransform<Scalar> bestFitTransform(const Eigen::MatrixBase<RefDerived>& reference,
                                        const Eigen::MatrixBase<CurDerived>& current,
                                        const Eigen::MatrixBase<WDerived>& weights) {
  const Scalar total = weights.sum();
  const Vector3<Scalar> refCenter = (reference * weights) / total;
  const Vector3<Scalar> curCenter = (current * weights) / total;

  Matrix3<Scalar> covariance = Matrix3<Scalar>::Zero();
  for (Eigen::Index i = 0; i < reference.cols(); ++i) {
    covariance.noalias() +=
        weights(i) * (current.col(i) - curCenter) * (reference.col(i) - refCenter).transpose();
  }
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(covariance, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3<Scalar> correction = Matrix3<Scalar>::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < Scalar(0)) {
    correction(2, 2) = Scalar(-1);
  }
  RigidTransform<Scalar> out;
  out.rotation = svd.matrixU() * correction * svd.matrixV().transpose();
  out.translation = curCenter - out.rotation * refCenter;
  return out;
}

/// Rotation of `point` by `angle` about the line through `pivot` along `axis`.
template <typename Scalar>
Vector3<Scalar> rotateAbout(const Vector3<Scalar>& point, const Vector3<Scalar>& pivot,
                            const Vector3<Scalar>& axis, Scalar angle) {
  const Eigen::AngleAxis<Scalar> rot(angle, axis.normalized());
  return pivot + rot * (point - pivot);
}

/// Signed rotation angle of `rotation` about `axis`, assuming the rotation is
/// (close to) a pure rotation about that axis.
template <typename Scalar>
Scalar angleAbout(const Matrix3<Scalar>& rotation, const Vector3<Scalar>& axis) {
  const Eigen::AngleAxis<Scalar> aa(rotation);
  const Scalar sign = aa.axis().dot(axis.normalized()) < Scalar(0) ? Scalar(-1) : Scalar(1);
  Scalar angle = sign * aa.angle();
  constexpr Scalar kPi = Scalar(3.14159265358979323846);
  if (angle > kPi) angle -= 2 * kPi;
  if (angle < -kPi) angle += 2 * kPi;
  return angle;
}

}  // namespace laika

#endif  // LAIKA_RIGID_HPP
