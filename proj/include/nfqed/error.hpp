#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nfqed {

enum class ErrorCode {
    NoRoot,
    MultipleRoots,
    BesselDomain,
    NotNormalized,
    QuadratureFailure,
    CoincidentPoints,
    InsideFiber,
    InvalidGeometry,
    ResampleExhausted,
    DimensionOverflow,
    SingularMatrix,
    InvalidArgument,
    ParseError,
    ValidationError,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; the code is what callers
// dispatch on (the CLI maps it to an exit status).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nfqed
