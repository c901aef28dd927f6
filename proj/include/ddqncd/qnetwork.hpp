#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ddqncd/dag.hpp"

namespace ddqncd {

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
};

// Multilayer perceptron with ReLU hidden layers and a linear head. Inputs and
// outputs are column-per-sample matrices. Parameters flatten layer by layer
// as (weight column-major, bias).
class QNetwork {
public:
    QNetwork() = default;
    // Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    QNetwork(int input_dim, const std::vector<int>& hidden, int output_dim, std::uint64_t seed);

    // p^2 adjacency inputs, 3p^2 action-value outputs.
    static QNetwork for_graph(int p, const std::vector<int>& hidden, std::uint64_t seed);

    int input_dim() const;
    int output_dim() const;

    Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;
    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

    // Q(inputs[:, i], actions[i]) for each column, without materialising the full head.
    Eigen::VectorXd forward_selected(const Eigen::MatrixXd& inputs, std::span<const int> actions) const;

    // Mean squared error (1/b) sum_i (Q(s_i, a_i) - y_i)^2 and its gradient
    // with respect to the flattened parameters.
    double loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> actions,
                             std::span<const double> targets, Eigen::VectorXd& gradient) const;
    double loss(const Eigen::MatrixXd& inputs, std::span<const int> actions, std::span<const double> targets) const;

    std::size_t parameter_count() const;
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

private:
    // Hidden activations of the last hidden layer (or the inputs when there are none).
    Eigen::MatrixXd trunk(const Eigen::MatrixXd& inputs, std::vector<Eigen::MatrixXd>* pre = nullptr,
                          std::vector<Eigen::MatrixXd>* act = nullptr) const;

    std::vector<DenseLayer> layers_;
};

// Flattened adjacency (row-major 0/1) used as network input.
Eigen::VectorXd encode_state(const Dag& g);
Eigen::MatrixXd encode_states(std::span<const Dag* const> graphs);

// target <- (1 - tau) target + tau online, elementwise.
void polyak_update(QNetwork& target, const QNetwork& online, double tau);

// Adaptive moment estimation over the flattened parameters.
class Adam {
public:
    Adam() = default;
    Adam(std::size_t n, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

    void step(QNetwork& net, const Eigen::VectorXd& gradient);
    long long steps() const { return t_; }

private:
    double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    long long t_ = 0;
    Eigen::VectorXd m_, v_;
};

}  // namespace ddqncd
