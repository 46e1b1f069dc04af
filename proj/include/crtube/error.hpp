#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crtube {

/// Base of every error raised by the library. `kind()` is the stable name used
/// in reports and CLI diagnostics.
class Error : public std::runtime_error
{
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind))
    {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CRTUBE_DEFINE_ERROR(Name)                                                    \
    class Name : public Error                                                        \
    {                                                                                \
    public:                                                                          \
        explicit Name(const std::string& what) : Error(#Name, what) {}               \
    }

// jet kernel
CRTUBE_DEFINE_ERROR(DivisionBySingularJet);
CRTUBE_DEFINE_ERROR(DomainError);
CRTUBE_DEFINE_ERROR(ExpansionPointMismatch);
CRTUBE_DEFINE_ERROR(OrderExceeded);

// expression language
CRTUBE_DEFINE_ERROR(UnknownFunction);
CRTUBE_DEFINE_ERROR(ArityMismatch);
CRTUBE_DEFINE_ERROR(UnboundParameter);

// geometry
CRTUBE_DEFINE_ERROR(LeviRankViolation);
CRTUBE_DEFINE_ERROR(TwoDegeneracyViolation);
CRTUBE_DEFINE_ERROR(SingularJacobian);
CRTUBE_DEFINE_ERROR(RangeError);
CRTUBE_DEFINE_ERROR(InvalidParameter);

// harness
CRTUBE_DEFINE_ERROR(TrialDomainError);
CRTUBE_DEFINE_ERROR(PreconditionFailure);
CRTUBE_DEFINE_ERROR(ConfigError);

#undef CRTUBE_DEFINE_ERROR

class ParseError : public Error
{
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
        : Error("ParseError", what + " at offset " + std::to_string(offset)), offset_(offset),
          expected_(std::move(expected))
    {}

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class NewtonNoConvergence : public Error
{
public:
    NewtonNoConvergence(std::vector<double> trace, const std::string& what)
        : Error("NewtonNoConvergence", what), trace_(std::move(trace))
    {}

    /// Iterates visited before giving up.
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

} // namespace crtube
