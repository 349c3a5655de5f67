#pragma once

#include <cassert>
#include <vector>

namespace lpstoch {

/// Dense rank-3 tensor of doubles, zero-initialized.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int n0, int n1, int n2)
        : n0_(n0), n1_(n1), n2_(n2), v_(static_cast<size_t>(n0) * n1 * n2, 0.0) {}

    double& operator()(int i, int j, int k) {
        assert(i >= 0 && i < n0_ && j >= 0 && j < n1_ && k >= 0 && k < n2_);
        return v_[(static_cast<size_t>(i) * n1_ + j) * n2_ + k];
    }
    double operator()(int i, int j, int k) const {
        assert(i >= 0 && i < n0_ && j >= 0 && j < n1_ && k >= 0 && k < n2_);
        return v_[(static_cast<size_t>(i) * n1_ + j) * n2_ + k];
    }

    int dim0() const { return n0_; }
    int dim1() const { return n1_; }
    int dim2() const { return n2_; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    int n0_ = 0, n1_ = 0, n2_ = 0;
    std::vector<double> v_;
};

}  // namespace lpstoch
