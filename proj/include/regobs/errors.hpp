#ifndef REGOBS_ERRORS_HPP
#define REGOBS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace regobs
{
    enum class ErrorCode
    {
        InvalidArgument,
        CornerPoint,
        UnsupportedRegion,
        EmptyRegion,
        NotHyperbolic,
        BoundaryRegion,
        InteriorRegion,
        TerminationDominant,
        OutOfRange,
        GridMismatch,
        NonCommensurateTime,
        ConfigUnsupported,
        CFLViolation,
        NoConvergence,
        ChiSupportViolation,
        TimeTooShort,
        Config,
        Io
    };

    const char * error_name(ErrorCode code);

    /// Every failure raised by the library carries one of the codes above so that
    /// front ends can map it onto an exit status without parsing messages.
    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string& what)
            : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    inline const char * error_name(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::CornerPoint: return "CornerPoint";
        case ErrorCode::UnsupportedRegion: return "UnsupportedRegion";
        case ErrorCode::EmptyRegion: return "EmptyRegion";
        case ErrorCode::NotHyperbolic: return "NotHyperbolic";
        case ErrorCode::BoundaryRegion: return "BoundaryRegion";
        case ErrorCode::InteriorRegion: return "InteriorRegion";
        case ErrorCode::TerminationDominant: return "TerminationDominant";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::NonCommensurateTime: return "NonCommensurateTime";
        case ErrorCode::ConfigUnsupported: return "ConfigUnsupported";
        case ErrorCode::CFLViolation: return "CFLViolation";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::ChiSupportViolation: return "ChiSupportViolation";
        case ErrorCode::TimeTooShort: return "TimeTooShort";
        case ErrorCode::Config: return "ConfigError";
        case ErrorCode::Io: return "IoError";
        }
        return "Error";
    }

    /// Iterative solver that stopped early; carries its best estimate.
    class ConvergenceError : public Error
    {
    public:
        ConvergenceError(const std::string& what, int iterations, double best_estimate)
            : Error(ErrorCode::NoConvergence, what), iterations_(iterations), best_estimate_(best_estimate) {}

        int iterations() const noexcept { return iterations_; }
        double best_estimate() const noexcept { return best_estimate_; }

    private:
        int iterations_;
        double best_estimate_;
    };

    inline void require(bool condition, ErrorCode code, const std::string& what)
    {
        if (!condition)
            throw Error(code, what);
    }
} // namespace regobs

#endif
