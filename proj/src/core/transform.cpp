#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "vgreg/core.hpp"

namespace vgreg {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::InsufficientCorrespondences: return "InsufficientCorrespondences";
        case ErrorKind::NoConsensus: return "NoConsensus";
        case ErrorKind::EmptyInlierSet: return "EmptyInlierSet";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_proper_rotation(const Matrix3& r, double tol) {
    if (!r.allFinite()) return false;
    const Matrix3 gram = r.transpose() * r;
    if (((gram - Matrix3::Identity()).array().abs() > tol).any()) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
}

RigidTransform::RigidTransform(const Matrix3& rotation, const Point3& translation)
    : rotation_(rotation), translation_(translation) {
    if (!is_proper_rotation(rotation)) {
        std::ostringstream msg;
        msg << "rotation is not orthonormal with det +1:\n" << rotation;
        throw InvalidArgument(msg.str());
    }
    if (!translation.allFinite()) throw InvalidArgument("translation has non-finite entries");
}

RigidTransform RigidTransform::unchecked(const Matrix3& rotation, const Point3& translation) {
    RigidTransform t;
    t.rotation_ = rotation;
    t.translation_ = translation;
    return t;
}

RigidTransform RigidTransform::from_matrix(const Matrix4& m) {
    const Eigen::RowVector4d last = m.row(3);
    if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > kTolerance) {
        throw InvalidArgument("homogeneous matrix must end with row (0, 0, 0, 1)");
    }
    return RigidTransform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

RigidTransform RigidTransform::from_axis_angle(const Point3& axis, double angle_rad,
                                               const Point3& translation) {
    const double n = axis.norm();
    if (!(n > 0.0) || !std::isfinite(angle_rad)) {
        throw InvalidArgument("axis must be non-zero and angle finite");
    }
    const Matrix3 r = Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix();
    return RigidTransform(r, translation);
}

Matrix4 RigidTransform::matrix() const {
    Matrix4 m = Matrix4::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
}

RigidTransform RigidTransform::inverse() const {
    const Matrix3 rt = rotation_.transpose();
    return unchecked(rt, -(rt * translation_));
}

double RigidTransform::angle() const {
    const double c = std::clamp((rotation_.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    return RigidTransform::unchecked(a.rotation() * b.rotation(),
                                     a.rotation() * b.translation() + a.translation());
}

const char* to_string(Provenance p) {
    return p == Provenance::Visual ? "visual" : "geometric";
}

void PointCloud::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].allFinite()) {
            throw InvalidArgument("point " + std::to_string(i) + " has non-finite coordinates");
        }
    }
    if (!normals.empty()) {
        if (normals.size() != points.size()) throw InvalidArgument("normal count differs from point count");
        for (std::size_t i = 0; i < normals.size(); ++i) {
            if (std::abs(normals[i].norm() - 1.0) > 1e-6) {
                throw InvalidArgument("normal " + std::to_string(i) + " is not unit length");
            }
        }
    }
    if (!descriptors.empty()) {
        if (descriptors.size() != points.size()) {
            throw InvalidArgument("descriptor count differs from point count");
        }
        const std::size_t dim = descriptors.front().size();
        for (const auto& d : descriptors) {
            if (d.size() != dim) throw InvalidArgument("descriptors have mixed dimensions");
        }
    }
}

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& t) {
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
    out.normals.reserve(cloud.normals.size());
    for (const auto& n : cloud.normals) out.normals.push_back(t.rotation() * n);
    out.descriptors = cloud.descriptors;
    return out;
}

CorrespondenceSet concat(CorrespondenceView a, CorrespondenceView b) {
    CorrespondenceSet out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace vgreg
