#pragma once
#include <stdexcept>
#include <string>
#include <string_view>

namespace seqdesign {

enum class ErrorKind {
    parameter,
    impossible_observation,
    empty_window,
    model_violation,
    degenerate_design,
    validation,
    io,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::impossible_observation: return "impossible-observation";
        case ErrorKind::empty_window: return "empty-window";
        case ErrorKind::model_violation: return "model-violation";
        case ErrorKind::degenerate_design: return "degenerate-design";
        case ErrorKind::validation: return "validation";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace seqdesign
