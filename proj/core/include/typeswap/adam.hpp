#pragma once

#include <vector>

#include "typeswap/model.hpp"

namespace typeswap {

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

/// Adam with bias correction folded into the step size:
///   lr_t = lr * sqrt(1 - b2^t) / (1 - b1^t);  p -= lr_t * m / (sqrt(v) + eps)
class Adam {
public:
    Adam(AdamConfig config, std::size_t parameter_count);

    void step(ParameterSet& params, const ParameterSet& grad);

    long steps() const { return t_; }
    const AdamConfig& config() const { return config_; }

private:
    AdamConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    long t_ = 0;
};

}  // namespace typeswap
