#include "gbnn/base_learner.hpp"

#include <algorithm>
#include <cmath>

#include "gbnn/errors.hpp"
#include "gbnn/kernels.hpp"
#include "gbnn/numeric.hpp"
#include "gbnn/random.hpp"
#include "lbfgs.hpp"

namespace gbnn {

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Logistic: return "logistic";
        case Activation::Relu: return "relu";
    }
    return "unknown";
}

Activation activation_from_name(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "logistic") return Activation::Logistic;
    if (name == "relu") return Activation::Relu;
    throw ConfigError("unknown activation '" + name + "' (expected tanh, logistic or relu)");
}

void activate(Activation a, std::span<double> z) noexcept {
    switch (a) {
        case Activation::Tanh:
            for (double& v : z) v = std::tanh(v);
            break;
        case Activation::Logistic:
            for (double& v : z) v = sigmoid(v);
            break;
        case Activation::Relu:
            for (double& v : z) v = std::max(v, 0.0);
            break;
    }
}

namespace {

// Derivative of the activation expressed through its pre-activation z and
// output a = act(z).
double activation_slope(Activation act, double z, double a) noexcept {
    switch (act) {
        case Activation::Tanh: return 1.0 - a * a;
        case Activation::Logistic: return a * (1.0 - a);
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

void check_width(const SubNetwork& net, const Matrix& features) {
    if (features.cols() != net.inputs()) {
        throw ShapeError("sub-network expects " + std::to_string(net.inputs()) +
                         " features, got " + std::to_string(features.cols()));
    }
}

// Hidden pre-activations of one row: z_j = v_j . x + b_j.
void hidden_preactivation(const Matrix& hidden, std::span<const double> x, std::span<double> z,
                          const kernels::KernelSet& k) {
    const std::size_t d = x.size();
    for (std::size_t j = 0; j < hidden.rows(); ++j) {
        const double* v = hidden.row(j).data();
        z[j] = k.dot(v, x.data(), d) + v[d];
    }
}

}  // namespace

Matrix predict(const SubNetwork& net, const Matrix& features) {
    check_width(net, features);
    const auto& k = kernels::active();
    const std::size_t units = net.units();
    Matrix out(features.rows(), net.outputs());
    std::vector<double> a(units);
    for (std::size_t i = 0; i < features.rows(); ++i) {
        hidden_preactivation(net.hidden, features.row(i), a, k);
        activate(net.activation, a);
        for (std::size_t o = 0; o < net.outputs(); ++o) {
            const double* w = net.output.row(o).data();
            out(i, o) = k.dot(w, a.data(), units) + w[units];
        }
    }
    return out;
}

double squared_error_objective(const SubNetwork& net, const Matrix& features,
                               const Matrix& targets, SubNetwork* gradient) {
    check_width(net, features);
    require_shape(targets, features.rows(), net.outputs(), "sub-network targets");
    if (features.rows() == 0) throw DataError("sub-network objective: no rows");

    const auto& k = kernels::active();
    const std::size_t d = net.inputs();
    const std::size_t units = net.units();
    const std::size_t outs = net.outputs();

    if (gradient != nullptr) {
        gradient->hidden = Matrix(units, d + 1);
        gradient->output = Matrix(outs, units + 1);
        gradient->activation = net.activation;
    }

    std::vector<double> z(units), a(units), err(outs), delta(units);
    double total = 0.0;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto x = features.row(i);
        hidden_preactivation(net.hidden, x, z, k);
        std::ranges::copy(z, a.begin());
        activate(net.activation, a);

        for (std::size_t o = 0; o < outs; ++o) {
            const double* w = net.output.row(o).data();
            err[o] = k.dot(w, a.data(), units) + w[units] - targets(i, o);
            total += err[o] * err[o];
        }
        if (gradient == nullptr) continue;

        std::ranges::fill(delta, 0.0);
        for (std::size_t o = 0; o < outs; ++o) {
            auto gw = gradient->output.row(o);
            k.axpy(err[o], a.data(), gw.data(), units);
            gw[units] += err[o];
            const double* w = net.output.row(o).data();
            for (std::size_t j = 0; j < units; ++j) delta[j] += err[o] * w[j];
        }
        for (std::size_t j = 0; j < units; ++j) {
            const double dj = delta[j] * activation_slope(net.activation, z[j], a[j]);
            auto gv = gradient->hidden.row(j);
            k.axpy(dj, x.data(), gv.data(), d);
            gv[d] += dj;
        }
    }

    const double n = static_cast<double>(features.rows());
    if (gradient != nullptr) {
        for (Matrix* m : {&gradient->hidden, &gradient->output}) {
            for (std::size_t i = 0; i < m->size(); ++i) m->data()[i] /= n;
        }
    }
    return 0.5 * total / n;
}

double mean_squared_error(const SubNetwork& net, const Matrix& features, const Matrix& targets) {
    const double objective = squared_error_objective(net, features, targets, nullptr);
    return 2.0 * objective / static_cast<double>(net.outputs());
}

SubNetwork initialize_network(std::size_t inputs, std::size_t units, std::size_t outputs,
                              Activation activation, double init_scale, std::uint64_t seed) {
    if (inputs == 0 || units == 0 || outputs == 0) {
        throw ConfigError("sub-network needs at least one input, hidden unit and output");
    }
    RandomStream stream(seed);
    SubNetwork net{Matrix(units, inputs + 1), Matrix(outputs, units + 1), activation};
    const double hidden_range = init_scale * std::sqrt(6.0 / static_cast<double>(inputs + units));
    const double output_range = init_scale * std::sqrt(6.0 / static_cast<double>(units + outputs));
    for (std::size_t i = 0; i < net.hidden.size(); ++i) {
        net.hidden.data()[i] = stream.uniform(-hidden_range, hidden_range);
    }
    for (std::size_t i = 0; i < net.output.size(); ++i) {
        net.output.data()[i] = stream.uniform(-output_range, output_range);
    }
    return net;
}

SubNetwork fit(const Matrix& features, const Matrix& targets, std::size_t units,
               const FitConfig& config, std::uint64_t seed, FitReport* report) {
    if (features.rows() == 0) throw DataError("fit: no training rows");
    if (config.max_iterations == 0) throw ConfigError("fit: max_iterations must be at least 1");
    if (!(config.tolerance >= 0.0)) throw ConfigError("fit: tolerance must be non-negative");
    if (!(config.init_scale > 0.0)) throw ConfigError("fit: init_scale must be positive");
    require_shape(targets, features.rows(), targets.cols(), "fit targets");
    if (!targets.all_finite()) throw DataError("fit: residual targets must be finite");

    SubNetwork net = initialize_network(features.cols(), units, targets.cols(), config.activation,
                                        config.init_scale, seed);
    const std::size_t hidden_size = net.hidden.size();

    SubNetwork scratch = net;
    SubNetwork grad;
    detail::Objective objective = [&](std::span<const double> w, std::span<double> g) {
        std::copy_n(w.begin(), hidden_size, scratch.hidden.data());
        std::copy(w.begin() + static_cast<std::ptrdiff_t>(hidden_size), w.end(),
                  scratch.output.data());
        const double value = squared_error_objective(scratch, features, targets, &grad);
        std::copy_n(grad.hidden.data(), hidden_size, g.begin());
        std::copy_n(grad.output.data(), grad.output.size(),
                    g.begin() + static_cast<std::ptrdiff_t>(hidden_size));
        return value;
    };

    std::vector<double> w0(net.hidden.values());
    w0.insert(w0.end(), net.output.values().begin(), net.output.values().end());

    detail::LbfgsOptions options;
    options.max_iterations = config.max_iterations;
    options.tolerance = config.tolerance;
    options.history = std::max<std::size_t>(config.history, 1);
    const detail::LbfgsResult result = detail::minimize_lbfgs(objective, std::move(w0), options);
    if (!result.finite || !std::isfinite(result.value)) {
        throw TrainingDiverged("sub-network loss is not finite (init_scale " +
                               std::to_string(config.init_scale) + ")");
    }

    std::copy_n(result.x.begin(), hidden_size, net.hidden.data());
    std::copy(result.x.begin() + static_cast<std::ptrdiff_t>(hidden_size), result.x.end(),
              net.output.data());

    if (report != nullptr) {
        const double per_entry = 2.0 / static_cast<double>(targets.cols());
        report->initial_mse = result.initial_value * per_entry;
        report->final_mse = result.value * per_entry;
        report->iterations = result.iterations;
        report->evaluations = result.evaluations;
    }
    return net;
}

}  // namespace gbnn
