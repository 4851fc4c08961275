#pragma once

#include <stdexcept>
#include <string>

namespace ltiflow {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// exactalg
struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& msg = "matrix is singular") : Error(msg) {}
};
struct SingularD : Error {
    explicit SingularD(const std::string& msg = "D block is singular") : Error(msg) {}
};
struct NonConstantEntries : Error {
    explicit NonConstantEntries(const std::string& msg = "matrix entries must be constant")
        : Error(msg) {}
};
struct PoleAtPoint : Error {
    std::size_t row, col;
    PoleAtPoint(std::size_t r, std::size_t c)
        : Error("denominator vanishes at evaluation point, entry (" + std::to_string(r) + "," +
                std::to_string(c) + ")"),
          row(r), col(c) {}
};

// netmodel
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};
struct PortKindViolation : Error {
    explicit PortKindViolation(const std::string& msg) : Error(msg) {}
};
struct LoopSingular : Error {
    explicit LoopSingular(const std::string& msg = "closed loop has no transfer function")
        : Error(msg) {}
};
struct EvaluationPole : Error {
    explicit EvaluationPole(const std::string& msg) : Error(msg) {}
};
struct InvalidCut : Error {
    explicit InvalidCut(const std::string& msg) : Error(msg) {}
};
struct TooManyRelays : Error {
    explicit TooManyRelays(const std::string& msg) : Error(msg) {}
};
struct PoleAtLambda : Error {
    explicit PoleAtLambda(const std::string& msg) : Error(msg) {}
};
struct MincutMismatch : Error {
    explicit MincutMismatch(const std::string& msg) : Error(msg) {}
};
struct InvalidConfig : Error {
    explicit InvalidConfig(const std::string& msg) : Error(msg) {}
};

// linearizer
struct ModeShapeMismatch : Error {
    explicit ModeShapeMismatch(const std::string& msg) : Error(msg) {}
};
struct OffsetViolation : Error {
    explicit OffsetViolation(const std::string& msg) : Error(msg) {}
};
struct SynthesisBudgetExceeded : Error {
    explicit SynthesisBudgetExceeded(const std::string& msg) : Error(msg) {}
};

// decsys
struct TooManyControllers : Error {
    explicit TooManyControllers(const std::string& msg) : Error(msg) {}
};
struct UnsupportedSpectrum : Error {
    explicit UnsupportedSpectrum(const std::string& msg) : Error(msg) {}
};
struct NotJordanForm : Error {
    explicit NotJordanForm(const std::string& msg) : Error(msg) {}
};
struct EquivalenceViolation : Error {
    explicit EquivalenceViolation(const std::string& msg) : Error(msg) {}
};
struct InnerLoopSingular : Error {
    explicit InnerLoopSingular(const std::string& msg = "inner loop matrix is singular")
        : Error(msg) {}
};

// conet
struct NonCausalEntry : Error {
    explicit NonCausalEntry(const std::string& msg) : Error(msg) {}
};
struct StrongConnectivityRequired : Error {
    explicit StrongConnectivityRequired(const std::string& msg) : Error(msg) {}
};
struct NoMarginFound : Error {
    explicit NoMarginFound(const std::string& msg) : Error(msg) {}
};
struct NotStabilizable : Error {
    explicit NotStabilizable(const std::string& msg) : Error(msg) {}
};
struct NotIndependentlyStabilizable : Error {
    explicit NotIndependentlyStabilizable(const std::string& msg) : Error(msg) {}
};

// io
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace ltiflow
