#include "gbnn/flat_network.hpp"

#include <algorithm>

#include "gbnn/errors.hpp"
#include "gbnn/kernels.hpp"
#include "gbnn/numeric.hpp"

namespace gbnn {

void FlatNetwork::validate() const {
    const std::size_t t = stages();
    const std::size_t k = task.outputs();
    if (units_per_stage == 0) throw ShapeError("flat network: units_per_stage must be positive");
    if (hidden.rows() != t * units_per_stage) {
        throw ShapeError("flat network: hidden has " + std::to_string(hidden.rows()) +
                         " rows, expected stages*units = " + std::to_string(t * units_per_stage));
    }
    if (hidden.cols() < 2) throw ShapeError("flat network: hidden needs at least one input column");
    require_shape(output, k, t * units_per_stage, "flat network output weights");
    require_shape(stage_bias, k, t, "flat network stage biases");
    if (base_bias.size() != k) throw ShapeError("flat network: base_bias length differs from outputs");
    if (active_stages > t) throw ShapeError("flat network: active_stages exceeds stages");
}

FlatNetwork flatten(const BoostedEnsemble& model) {
    if (model.stages.empty()) throw ConfigError("flatten: ensemble has no stages");

    const std::size_t t_count = model.stages.size();
    const std::size_t j = model.config.units_per_stage;
    const std::size_t d = model.feature_width;
    const std::size_t k = model.outputs();
    // Binary margins enter the logistic as 2F.
    const double scale = model.config.task.loss == LossKind::BinaryLogistic ? 2.0 : 1.0;

    FlatNetwork net;
    net.hidden = Matrix(t_count * j, d + 1);
    net.output = Matrix(k, t_count * j);
    net.stage_bias = Matrix(k, t_count);
    net.base_bias.resize(k);
    net.activation = model.stages.front().net.activation;
    net.task = model.config.task;
    net.units_per_stage = j;
    net.active_stages = t_count;

    for (std::size_t o = 0; o < k; ++o) net.base_bias[o] = scale * model.f0[o];

    for (std::size_t t = 0; t < t_count; ++t) {
        const StageModel& stage = model.stages[t];
        if (stage.net.units() != j || stage.net.inputs() != d || stage.net.outputs() != k) {
            throw ShapeError("flatten: stage " + std::to_string(t + 1) + " has inconsistent shape");
        }
        if (stage.net.activation != net.activation) {
            throw ShapeError("flatten: stages use different hidden activations");
        }
        for (std::size_t u = 0; u < j; ++u) {
            std::ranges::copy(stage.net.hidden.row(u), net.hidden.row(t * j + u).begin());
        }
        for (std::size_t o = 0; o < k; ++o) {
            const double w = scale * stage.rho_eff[o];
            for (std::size_t u = 0; u < j; ++u) net.output(o, t * j + u) = w * stage.net.output(o, u);
            net.stage_bias(o, t) = w * stage.net.output(o, j);
        }
    }
    return net;
}

FlatNetwork set_active_stages(FlatNetwork net, std::size_t m) {
    if (m > net.stages()) {
        throw RangeError("requested " + std::to_string(m) + " active stages, network has " +
                         std::to_string(net.stages()));
    }
    net.active_stages = m;
    return net;
}

Matrix forward(const FlatNetwork& net, const Matrix& features, ForwardStats* stats) {
    if (features.cols() != net.inputs()) {
        throw ShapeError("flat network expects " + std::to_string(net.inputs()) +
                         " features, got " + std::to_string(features.cols()));
    }
    const auto& kset = kernels::active();
    const std::size_t d = net.inputs();
    const std::size_t units = net.active_units();
    const std::size_t k = net.outputs();
    const std::size_t total_units = net.output.cols();

    std::vector<double> bias = net.base_bias;
    for (std::size_t o = 0; o < k; ++o) {
        for (std::size_t t = 0; t < net.active_stages; ++t) bias[o] += net.stage_bias(o, t);
    }

    Matrix out(features.rows(), k);
    std::vector<double> a(units);
    std::size_t evaluated = 0;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto x = features.row(i);
        for (std::size_t u = 0; u < units; ++u) {
            const double* v = net.hidden.row(u).data();
            a[u] = kset.dot(v, x.data(), d) + v[d];
            ++evaluated;
        }
        activate(net.activation, a);
        auto row = out.row(i);
        for (std::size_t o = 0; o < k; ++o) {
            row[o] = kset.dot(net.output.data() + o * total_units, a.data(), units) + bias[o];
        }
        switch (net.task.loss) {
            case LossKind::BinaryLogistic: row[0] = sigmoid(row[0]); break;
            case LossKind::MultiClassCrossEntropy: softmax(row, row); break;
            case LossKind::SquaredError: break;
        }
    }
    if (stats != nullptr) stats->hidden_units_evaluated += evaluated;
    return out;
}

}  // namespace gbnn
