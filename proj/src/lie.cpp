#include "lpstoch/lie.hpp"

#include <cmath>
#include <stdexcept>

namespace lpstoch {

Mat3 hat(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v(2), v(1),
         v(2), 0.0, -v(0),
         -v(1), v(0), 0.0;
    return m;
}

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Mat3 so3_exp(const Vec3& w) {
    const double th = w.norm();
    if (th < 1e-12) {
        // second-order series keeps exp(v)exp(-v) = I to machine precision
        const Mat3 K = hat(w);
        return Mat3::Identity() + K + 0.5 * K * K;
    }
    const Mat3 K = hat(w / th);
    return Mat3::Identity() + std::sin(th) * K + (1.0 - std::cos(th)) * K * K;
}

Vec3 so3_log(const Mat3& R) {
    const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
    const double th = std::acos(c);
    const Vec3 r(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    if (th < 1e-6) {
        return 0.5 * (1.0 + th * th / 6.0) * r;
    }
    if (th > M_PI - 1e-6) {
        // axis from the dominant diagonal of (R + I)/2
        Mat3 S = 0.5 * (R + Mat3::Identity());
        int i = 0;
        S.diagonal().maxCoeff(&i);
        Vec3 axis = S.col(i) / std::sqrt(std::max(S(i, i), 1e-30));
        axis.normalize();
        // fix the sign using the off-diagonal part where it is still informative
        if (r.norm() > 1e-12 && axis.dot(r) < 0.0) axis = -axis;
        return th * axis;
    }
    return 0.5 * th / std::sin(th) * r;
}

Mat3 so3_project(const Mat3& R) {
    Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 P = svd.matrixU() * svd.matrixV().transpose();
    if (P.determinant() < 0.0) {
        Mat3 D = Mat3::Identity();
        D(2, 2) = -1.0;
        P = svd.matrixU() * D * svd.matrixV().transpose();
    }
    return P;
}

double ortho_defect(const Mat3& R) {
    return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Tensor3 GroupSpec::structure_constants() const {
    const int d = dim();
    Tensor3 C(d, d, d);
    int off = 0;
    for (auto k : factors) {
        if (k == GroupKind::SO3) {
            // Levi-Civita block: [e_b, e_c] = eps_abc e_a
            const int a = off;
            C(a + 0, a + 1, a + 2) = 1.0;
            C(a + 0, a + 2, a + 1) = -1.0;
            C(a + 1, a + 2, a + 0) = 1.0;
            C(a + 1, a + 0, a + 2) = -1.0;
            C(a + 2, a + 0, a + 1) = 1.0;
            C(a + 2, a + 1, a + 0) = -1.0;
        }
        off += algebra_dim(k);
    }
    return C;
}

GroupElement GroupElement::identity(const GroupSpec& spec) {
    GroupElement g;
    for (auto k : spec.factors) {
        Block b;
        b.kind = k;
        g.blocks_.push_back(b);
    }
    return g;
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a > M_PI) a -= 2.0 * M_PI;
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

GroupElement GroupElement::compose(const GroupElement& other) const {
    if (blocks_.size() != other.blocks_.size())
        throw std::invalid_argument("GroupElement::compose: mismatched factors");
    GroupElement out = *this;
    for (size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].kind != other.blocks_[i].kind)
            throw std::invalid_argument("GroupElement::compose: mismatched factors");
        if (blocks_[i].kind == GroupKind::Circle)
            out.blocks_[i].angle = wrap_angle(blocks_[i].angle + other.blocks_[i].angle);
        else
            out.blocks_[i].R = blocks_[i].R * other.blocks_[i].R;
    }
    return out;
}

GroupElement GroupElement::inverse() const {
    GroupElement out = *this;
    for (auto& b : out.blocks_) {
        if (b.kind == GroupKind::Circle)
            b.angle = wrap_angle(-b.angle);
        else
            b.R.transposeInPlace();
    }
    return out;
}

double GroupElement::ortho_defect() const {
    double m = 0.0;
    for (const auto& b : blocks_)
        if (b.kind == GroupKind::SO3) m = std::max(m, lpstoch::ortho_defect(b.R));
    return m;
}

void GroupElement::renormalize() {
    for (auto& b : blocks_)
        if (b.kind == GroupKind::SO3 && lpstoch::ortho_defect(b.R) > kOrthoTol)
            b.R = so3_project(b.R);
}

bool GroupElement::finite() const {
    for (const auto& b : blocks_) {
        if (b.kind == GroupKind::Circle) {
            if (!std::isfinite(b.angle)) return false;
        } else if (!b.R.allFinite()) {
            return false;
        }
    }
    return true;
}

GroupElement exp_group(const GroupSpec& spec, const Vec& xi) {
    if (xi.size() != spec.dim())
        throw std::invalid_argument("exp_group: algebra dimension mismatch");
    GroupElement g = GroupElement::identity(spec);
    int off = 0;
    for (int i = 0; i < g.blocks(); ++i) {
        auto& b = g.block(i);
        if (b.kind == GroupKind::Circle) {
            b.angle = wrap_angle(xi(off));
            off += 1;
        } else {
            b.R = so3_exp(xi.segment<3>(off));
            off += 3;
        }
    }
    return g;
}

Vec log_group(const GroupSpec& spec, const GroupElement& g) {
    Vec xi(spec.dim());
    int off = 0;
    for (int i = 0; i < g.blocks(); ++i) {
        const auto& b = g.block(i);
        if (b.kind == GroupKind::Circle) {
            xi(off) = wrap_angle(b.angle);
            off += 1;
        } else {
            xi.segment<3>(off) = so3_log(b.R);
            off += 3;
        }
    }
    return xi;
}

Vec Ad(const GroupElement& g, const Vec& xi) {
    Vec out(xi.size());
    int off = 0;
    for (int i = 0; i < g.blocks(); ++i) {
        const auto& b = g.block(i);
        if (b.kind == GroupKind::Circle) {
            out(off) = xi(off);
            off += 1;
        } else {
            out.segment<3>(off) = b.R * xi.segment<3>(off);
            off += 3;
        }
    }
    return out;
}

Vec ad(const Tensor3& C, const Vec& xi, const Vec& eta) {
    const int d = C.dim0();
    Vec out = Vec::Zero(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) out(a) += C(a, b, c) * xi(b) * eta(c);
    return out;
}

Vec coad(const Tensor3& C, const Vec& xi, const Vec& mu) {
    const int d = C.dim0();
    Vec out = Vec::Zero(d);
    for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a)
            for (int e = 0; e < d; ++e) out(b) += mu(a) * C(a, e, b) * xi(e);
    return out;
}

double jacobi_defect(const Tensor3& C) {
    const int d = C.dim0();
    double worst = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int g = 0; g < d; ++g) {
                    double s = 0.0;
                    for (int e = 0; e < d; ++e)
                        s += C(e, b, c) * C(a, e, g) + C(e, c, g) * C(a, e, b) +
                             C(e, g, b) * C(a, e, c);
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

double antisymmetry_defect(const Tensor3& C) {
    const int d = C.dim0();
    double worst = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                worst = std::max(worst, std::abs(C(a, b, c) + C(a, c, b)));
    return worst;
}

}  // namespace lpstoch
