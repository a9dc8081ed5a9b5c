#ifndef AGM3_ERRORS_HPP
#define AGM3_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace agm3 {

/// Failure taxonomy shared by all modules. Numeric codes escalate precision
/// before surfacing; geometric codes (NonGeneric, ...) never do.
enum class ErrorCode {
    NonConvergence,   // iteration budget exhausted
    AmbiguousRank,    // singular spectrum has no decisive gap
    CommonComponent,  // resultant vanished identically
    ZeroForm,         // a form degenerated to zero
    DegenerateLine,   // two coincident points where a secant was needed
    NonGeneric,       // geometric genericity assumption violated
    CountMismatch,    // a classically forced count failed after escalation
    ChartDegenerate,  // affine chart unusable for this input
    UsageError,       // bad CLI / config input
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::AmbiguousRank: return "AmbiguousRank";
        case ErrorCode::CommonComponent: return "CommonComponent";
        case ErrorCode::ZeroForm: return "ZeroForm";
        case ErrorCode::DegenerateLine: return "DegenerateLine";
        case ErrorCode::NonGeneric: return "NonGeneric";
        case ErrorCode::CountMismatch: return "CountMismatch";
        case ErrorCode::ChartDegenerate: return "ChartDegenerate";
        case ErrorCode::UsageError: return "UsageError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string stage, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + " [" + stage + "]: " + what),
          code_(code),
          stage_(std::move(stage)) {}

    ErrorCode code() const { return code_; }
    const std::string& stage() const { return stage_; }

    /// NonGeneric maps to exit 2; numeric failures to exit 3; usage to 1.
    int exit_code() const {
        switch (code_) {
            case ErrorCode::UsageError: return 1;
            case ErrorCode::NonGeneric:
            case ErrorCode::DegenerateLine:
            case ErrorCode::ZeroForm:
            case ErrorCode::ChartDegenerate: return 2;
            default: return 3;
        }
    }

private:
    ErrorCode code_;
    std::string stage_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& stage, const std::string& what) {
    throw Error(code, stage, what);
}

}  // namespace agm3

#endif
