#include "nfqed/error.hpp"

namespace nfqed {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::BesselDomain: return "BesselDomain";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::InsideFiber: return "InsideFiber";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::ResampleExhausted: return "ResampleExhausted";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

}  // namespace nfqed
