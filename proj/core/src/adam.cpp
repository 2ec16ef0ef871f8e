#include "typeswap/adam.hpp"

#include <cmath>

namespace typeswap {

Adam::Adam(AdamConfig config, std::size_t parameter_count)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
    if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

void Adam::step(ParameterSet& params, const ParameterSet& grad) {
    auto p = params.values();
    const auto g = grad.values();
    if (p.size() != m_.size() || g.size() != m_.size())
        throw std::invalid_argument("Adam: parameter count changed");
    ++t_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double lr_t = config_.learning_rate * std::sqrt(1.0 - std::pow(b2, static_cast<double>(t_))) /
                        (1.0 - std::pow(b1, static_cast<double>(t_)));
    for (std::size_t i = 0; i < p.size(); ++i) {
        m_[i] = b1 * m_[i] + (1.0 - b1) * g[i];
        v_[i] = b2 * v_[i] + (1.0 - b2) * g[i] * g[i];
        p[i] -= lr_t * m_[i] / (std::sqrt(v_[i]) + config_.epsilon);
    }
}

}  // namespace typeswap
