#include "funcnn/activation.hpp"

#include "funcnn/errors.hpp"

namespace funcnn {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::ReLU: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

Activation parse_activation(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "relu") return Activation::ReLU;
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw config_error("unknown activation '" + name + "' (valid: linear, relu, tanh, sigmoid)");
}

}  // namespace funcnn
