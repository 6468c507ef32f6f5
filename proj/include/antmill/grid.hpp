#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>

namespace antmill {

// Carrier for one radial profile; length must match the grid it lives on.
template <typename Scalar = double>
using RadialField = Eigen::Vector<Scalar, Eigen::Dynamic>;

using RealField = RadialField<double>;
using ComplexField = RadialField<std::complex<double>>;

// Uniform node set on [r_a, r_b] with r_a > 0. Node i sits at r_a + i*dr,
// endpoints included.
class RadialGrid {
  public:
    RadialGrid(double r_a, double r_b, Eigen::Index n) : r_a_(r_a), r_b_(r_b), n_(n) {
        if (!(r_a > 0.0)) throw std::invalid_argument("inner radius must be positive");
        if (!(r_b > r_a)) throw std::invalid_argument("outer radius must exceed inner radius");
        if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes");
        nodes_ = Eigen::VectorXd::LinSpaced(n, r_a, r_b);
    }

    double inner() const { return r_a_; }
    double outer() const { return r_b_; }
    Eigen::Index size() const { return n_; }
    double dr() const { return (r_b_ - r_a_) / static_cast<double>(n_ - 1); }

    const Eigen::VectorXd& nodes() const { return nodes_; }
    double node(Eigen::Index i) const { return nodes_(i); }

  private:
    double r_a_;
    double r_b_;
    Eigen::Index n_;
    Eigen::VectorXd nodes_;
};

}  // namespace antmill
