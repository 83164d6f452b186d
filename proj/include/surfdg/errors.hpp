#pragma once

#include <stdexcept>
#include <string>

namespace surfdg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A function value (level set, field, forcing) came out non-finite.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// |grad phi| vanished (critical point of the level-set function).
class DegenerateGradient : public Error {
public:
    using Error::Error;
};

/// An iterative method hit its iteration cap.
class NonConvergence : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Edge with more than two incident triangles, or an unmatched boundary edge
/// on a mesh that must be closed.
class NonManifold : public Error {
public:
    using Error::Error;
};

class EdgesNotBuilt : public Error {
public:
    using Error::Error;
};

/// Penalty weight below the coercivity bound.
class PenaltyTooSmall : public Error {
public:
    using Error::Error;
};

class NotSymmetric : public Error {
public:
    using Error::Error;
};

/// Krylov breakdown (p'Ap <= 0 in CG, rho/omega collapse in BiCGSTAB).
class SolverBreakdown : public Error {
public:
    using Error::Error;
};

class ZeroDiagonal : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace surfdg
