// linalg.hpp - small dense-matrix helpers shared across modules.

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qflux {

using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

template <class DerivedA, class DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = std::common_type_t<typename DerivedA::Scalar, typename DerivedB::Scalar>;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                              a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                Scalar(a(i, j)) * b.template cast<Scalar>();
    return out;
}

}  // namespace qflux
