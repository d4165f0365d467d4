#ifndef DGBO_INTEGRATOR_HPP
#define DGBO_INTEGRATOR_HPP

// Integrating-factor (Lawson) RK4 for  v' = diag(lambda) v + N(v)  on mode vectors.
// The diagonal part is propagated exactly; N is sampled at the four classical stages.

#include <Eigen/Dense>

namespace dgbo::detail {

class LawsonRK4 {
public:
    LawsonRK4(const Eigen::VectorXcd& lambda, double h)
        : h_(h), half_((lambda * (0.5 * h)).array().exp()), full_((lambda * h).array().exp()) {}

    double h() const { return h_; }
    const Eigen::VectorXcd& half_factor() const { return half_; }
    const Eigen::VectorXcd& full_factor() const { return full_; }

    template <class Rhs>
    Eigen::VectorXcd step(const Eigen::VectorXcd& v, Rhs&& N) const {
        const Eigen::ArrayXcd& E2 = half_.array();
        const Eigen::ArrayXcd& E = full_.array();
        const Eigen::VectorXcd k1 = N(v);
        const Eigen::VectorXcd ev2 = (E2 * v.array()).matrix();
        const Eigen::VectorXcd k2 = N(Eigen::VectorXcd(ev2 + 0.5 * h_ * (E2 * k1.array()).matrix()));
        const Eigen::VectorXcd k3 = N(Eigen::VectorXcd(ev2 + 0.5 * h_ * k2));
        const Eigen::VectorXcd k4 = N(Eigen::VectorXcd((E * v.array()).matrix() + h_ * (E2 * k3.array()).matrix()));
        return ((E * v.array()) +
                (h_ / 6.0) * (E * k1.array() + 2.0 * E2 * (k2.array() + k3.array()) + k4.array()))
            .matrix();
    }

private:
    double h_;
    Eigen::VectorXcd half_, full_;
};

} // namespace dgbo::detail

#endif
