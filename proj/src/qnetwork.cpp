#include "ddqncd/qnetwork.hpp"

#include <cmath>
#include <stdexcept>

#include "ddqncd/errors.hpp"
#include "ddqncd/rng.hpp"

namespace ddqncd {

QNetwork::QNetwork(int input_dim, const std::vector<int>& hidden, int output_dim, std::uint64_t seed) {
    if (input_dim <= 0 || output_dim <= 0) throw ConfigError("network dimensions must be positive");
    Rng rng(seed);
    int fan_in = input_dim;
    auto add_layer = [&](int out) {
        if (out <= 0) throw ConfigError("hidden widths must be positive");
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> u(-bound, bound);
        DenseLayer l{Eigen::MatrixXd(out, fan_in), Eigen::VectorXd(out)};
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
            for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = u(rng);
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = u(rng);
        layers_.push_back(std::move(l));
        fan_in = out;
    };
    for (int h : hidden) add_layer(h);
    add_layer(output_dim);
}

QNetwork QNetwork::for_graph(int p, const std::vector<int>& hidden, std::uint64_t seed) {
    return QNetwork(p * p, hidden, action_count(p), seed);
}

int QNetwork::input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }
int QNetwork::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

Eigen::MatrixXd QNetwork::trunk(const Eigen::MatrixXd& inputs, std::vector<Eigen::MatrixXd>* pre,
                                std::vector<Eigen::MatrixXd>* act) const {
    if (inputs.rows() != input_dim()) throw std::invalid_argument("QNetwork: input has wrong dimension");
    Eigen::MatrixXd a = inputs;
    if (act) act->push_back(a);
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
        Eigen::MatrixXd z = layers_[l].weight * a;
        z.colwise() += layers_[l].bias;
        a = z.cwiseMax(0.0);
        if (pre) pre->push_back(std::move(z));
        if (act) act->push_back(a);
    }
    return a;
}

Eigen::MatrixXd QNetwork::forward(const Eigen::MatrixXd& inputs) const {
    Eigen::MatrixXd h = trunk(inputs);
    Eigen::MatrixXd out = layers_.back().weight * h;
    out.colwise() += layers_.back().bias;
    return out;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& input) const {
    return forward(Eigen::MatrixXd(input)).col(0);
}

Eigen::VectorXd QNetwork::forward_selected(const Eigen::MatrixXd& inputs, std::span<const int> actions) const {
    Eigen::MatrixXd h = trunk(inputs);
    const auto& head = layers_.back();
    Eigen::VectorXd q(inputs.cols());
    for (Eigen::Index i = 0; i < inputs.cols(); ++i)
        q(i) = head.weight.row(actions[i]).dot(h.col(i)) + head.bias(actions[i]);
    return q;
}

double QNetwork::loss(const Eigen::MatrixXd& inputs, std::span<const int> actions,
                      std::span<const double> targets) const {
    const Eigen::VectorXd q = forward_selected(inputs, actions);
    double l = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) l += (q(i) - targets[i]) * (q(i) - targets[i]);
    return l / static_cast<double>(q.size());
}

double QNetwork::loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> actions,
                                   std::span<const double> targets, Eigen::VectorXd& gradient) const {
    const Eigen::Index b = inputs.cols();
    if (static_cast<Eigen::Index>(actions.size()) != b || static_cast<Eigen::Index>(targets.size()) != b)
        throw std::invalid_argument("QNetwork: batch sizes disagree");
    std::vector<Eigen::MatrixXd> pre, act;
    const Eigen::MatrixXd h = trunk(inputs, &pre, &act);
    const auto& head = layers_.back();

    gradient.setZero(static_cast<Eigen::Index>(parameter_count()));
    // Offsets of each layer inside the flat vector.
    std::vector<Eigen::Index> offset(layers_.size());
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        offset[l] = off;
        off += layers_[l].weight.size() + layers_[l].bias.size();
    }

    // The head's error signal is nonzero only at the taken action of each sample.
    const std::size_t L = layers_.size() - 1;
    Eigen::Map<Eigen::MatrixXd> gW_head(gradient.data() + offset[L], head.weight.rows(), head.weight.cols());
    Eigen::Map<Eigen::VectorXd> gb_head(gradient.data() + offset[L] + head.weight.size(), head.bias.size());
    Eigen::MatrixXd delta(h.rows(), b);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < b; ++i) {
        const int a = actions[i];
        const double q = head.weight.row(a).dot(h.col(i)) + head.bias(a);
        const double err = q - targets[i];
        loss += err * err;
        const double g = 2.0 * err / static_cast<double>(b);
        gW_head.row(a) += g * h.col(i).transpose();
        gb_head(a) += g;
        delta.col(i) = g * head.weight.row(a).transpose();
    }

    for (std::size_t l = L; l-- > 0;) {
        delta = delta.cwiseProduct((pre[l].array() > 0.0).cast<double>().matrix());
        Eigen::Map<Eigen::MatrixXd> gW(gradient.data() + offset[l], layers_[l].weight.rows(), layers_[l].weight.cols());
        Eigen::Map<Eigen::VectorXd> gb(gradient.data() + offset[l] + layers_[l].weight.size(), layers_[l].bias.size());
        gW.noalias() = delta * act[l].transpose();
        gb = delta.rowwise().sum();
        if (l > 0) delta = layers_[l].weight.transpose() * delta;
    }
    return loss / static_cast<double>(b);
}

std::size_t QNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

Eigen::VectorXd QNetwork::parameters() const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index off = 0;
    for (const auto& l : layers_) {
        flat.segment(off, l.weight.size()) = Eigen::Map<const Eigen::VectorXd>(l.weight.data(), l.weight.size());
        off += l.weight.size();
        flat.segment(off, l.bias.size()) = l.bias;
        off += l.bias.size();
    }
    return flat;
}

void QNetwork::set_parameters(const Eigen::VectorXd& flat) {
    if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
        throw std::invalid_argument("QNetwork: parameter vector has wrong length");
    Eigen::Index off = 0;
    for (auto& l : layers_) {
        Eigen::Map<Eigen::VectorXd>(l.weight.data(), l.weight.size()) = flat.segment(off, l.weight.size());
        off += l.weight.size();
        l.bias = flat.segment(off, l.bias.size());
        off += l.bias.size();
    }
}

Eigen::VectorXd encode_state(const Dag& g) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(g.cells().size()));
    for (std::size_t k = 0; k < g.cells().size(); ++k) x(static_cast<Eigen::Index>(k)) = g.cells()[k];
    return x;
}

Eigen::MatrixXd encode_states(std::span<const Dag* const> graphs) {
    if (graphs.empty()) return {};
    const auto dim = static_cast<Eigen::Index>(graphs.front()->cells().size());
    Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(graphs.size()));
    for (std::size_t c = 0; c < graphs.size(); ++c) {
        const auto& cells = graphs[c]->cells();
        for (Eigen::Index k = 0; k < dim; ++k) x(k, static_cast<Eigen::Index>(c)) = cells[k];
    }
    return x;
}

void polyak_update(QNetwork& target, const QNetwork& online, double tau) {
    auto& tl = target.layers();
    const auto& ol = online.layers();
    if (tl.size() != ol.size()) throw std::invalid_argument("polyak_update: architectures differ");
    for (std::size_t l = 0; l < tl.size(); ++l) {
        if (tl[l].weight.rows() != ol[l].weight.rows() || tl[l].weight.cols() != ol[l].weight.cols())
            throw std::invalid_argument("polyak_update: layer shapes differ");
        tl[l].weight = (1.0 - tau) * tl[l].weight + tau * ol[l].weight;
        tl[l].bias = (1.0 - tau) * tl[l].bias + tau * ol[l].bias;
    }
}

Adam::Adam(std::size_t n, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

void Adam::step(QNetwork& net, const Eigen::VectorXd& gradient) {
    if (gradient.size() != m_.size()) throw std::invalid_argument("Adam: gradient has wrong length");
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * gradient;
    v_ = beta2_ * v_ + (1.0 - beta2_) * gradient.cwiseAbs2();
    if (static_cast<std::size_t>(m_.size()) != net.parameter_count())
        throw std::invalid_argument("Adam: network has wrong parameter count");
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const double step = lr_ / c1;
    // In place, layer by layer, following the flattening order.
    Eigen::Index off = 0;
    auto apply = [&](double* w, Eigen::Index len) {
        Eigen::Map<Eigen::ArrayXd> theta(w, len);
        theta -= step * m_.array().segment(off, len) / ((v_.array().segment(off, len) / c2).sqrt() + eps_);
        off += len;
    };
    for (auto& l : net.layers()) {
        apply(l.weight.data(), l.weight.size());
        apply(l.bias.data(), l.bias.size());
    }
}

}  // namespace ddqncd
