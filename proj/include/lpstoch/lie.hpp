#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lpstoch/tensor3.hpp"

namespace lpstoch {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Orthogonality drift above this bound triggers re-projection onto SO(3).
inline constexpr double kOrthoTol = 1e-10;

/// hat(v) w = v x w.
Mat3 hat(const Vec3& v);
Vec3 vee(const Mat3& m);

/// Rodrigues formula.
Mat3 so3_exp(const Vec3& w);
/// Inverse of so3_exp; returns the rotation vector with angle in [0, pi].
Vec3 so3_log(const Mat3& R);
/// Nearest rotation matrix (polar projection).
Mat3 so3_project(const Mat3& R);
/// max_ij |R^T R - I|.
double ortho_defect(const Mat3& R);
/// Reduce an angle to (-pi, pi].
double wrap_angle(double a);

enum class GroupKind { Circle, SO3 };

inline int algebra_dim(GroupKind k) { return k == GroupKind::Circle ? 1 : 3; }

/// Direct product of S^1 and SO(3) factors; the algebra is the direct sum
/// with coordinates concatenated factor by factor.
struct GroupSpec {
    std::vector<GroupKind> factors;

    GroupSpec() = default;
    explicit GroupSpec(std::vector<GroupKind> f) : factors(std::move(f)) {}
    static GroupSpec so3() { return GroupSpec({GroupKind::SO3}); }
    static GroupSpec circle() { return GroupSpec({GroupKind::Circle}); }
    static GroupSpec trivial() { return GroupSpec({}); }

    int dim() const {
        int d = 0;
        for (auto k : factors) d += algebra_dim(k);
        return d;
    }

    /// C^a_bc in the concatenated basis; Levi-Civita on each SO(3) block.
    Tensor3 structure_constants() const;
};

/// Element of a product group; one block per factor.
class GroupElement {
public:
    struct Block {
        GroupKind kind = GroupKind::Circle;
        double angle = 0.0;  // Circle
        Mat3 R = Mat3::Identity();  // SO3
    };

    GroupElement() = default;
    static GroupElement identity(const GroupSpec& spec);

    int blocks() const { return static_cast<int>(blocks_.size()); }
    const Block& block(int i) const { return blocks_[i]; }
    Block& block(int i) { return blocks_[i]; }

    /// Group product, this * other (blockwise).
    GroupElement compose(const GroupElement& other) const;
    GroupElement inverse() const;

    double ortho_defect() const;
    /// Polar-project SO(3) blocks whose drift exceeds kOrthoTol.
    void renormalize();

    bool finite() const;

private:
    std::vector<Block> blocks_;
};

GroupElement exp_group(const GroupSpec& spec, const Vec& xi);
/// Blockwise logarithm; S^1 angles land in (-pi, pi].
Vec log_group(const GroupSpec& spec, const GroupElement& g);

/// Adjoint action in algebra coordinates: R*xi on SO(3) blocks, identity on S^1.
Vec Ad(const GroupElement& g, const Vec& xi);

/// (ad_xi eta)^a = C^a_bc xi^b eta^c.
Vec ad(const Tensor3& C, const Vec& xi, const Vec& eta);

/// Coadjoint: <coad(xi,mu), eta> = <mu, ad(xi,eta)>, i.e. coad(xi,mu)_b = mu_a C^a_db xi^d.
Vec coad(const Tensor3& C, const Vec& xi, const Vec& mu);

/// Worst absolute violation of the Jacobi identity of C.
double jacobi_defect(const Tensor3& C);

/// Worst absolute violation of C^a_bc = -C^a_cb.
double antisymmetry_defect(const Tensor3& C);

}  // namespace lpstoch
