#ifndef QMIRROR_ERRORS_HPP
#define QMIRROR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmirror {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParam : Error {
    InvalidParam(const std::string& name, const std::string& reason)
        : Error("invalid parameter '" + name + "': " + reason), param(name) {}
    std::string param;
};

struct BandwidthInconsistent : Error {
    using Error::Error;
};

struct ZetaSingular : Error {
    using Error::Error;
};

struct PowerZero : Error {
    using Error::Error;
};

struct ZetaZero : Error {
    using Error::Error;
};

struct DiscriminantNonpositive : Error {
    using Error::Error;
};

struct BracketFailure : Error {
    using Error::Error;
};

struct BandRegimeInvalid : Error {
    using Error::Error;
};

struct QuadratureNonConverged : Error {
    using Error::Error;
};

struct CutoffTooLow : Error {
    using Error::Error;
};

struct TailNonConverged : Error {
    using Error::Error;
};

struct FdrViolation : Error {
    FdrViolation(const std::string& msg, double worst_omega)
        : Error(msg), omega(worst_omega) {}
    double omega;
};

struct CovarianceNotPSD : Error {
    using Error::Error;
};

struct RelativisticVelocity : Error {
    using Error::Error;
};

struct StepTooCoarse : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace qmirror

#endif
