// errors.hpp - exception types shared by every qcorr module

#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand has the wrong Hilbert-space dimension.
class dimension_error : public error {
public:
    using error::error;
};

// A value violates the invariants of its type (non-Hermitian state, bad trace, ...).
class invariant_error : public error {
public:
    using error::error;
};

// S(rho||sigma) is infinite: rho has weight outside the support of sigma.
class support_error : public error {
public:
    using error::error;
};

// A correlation matrix lies outside the positivity region of its product state.
class feasibility_error : public error {
public:
    using error::error;
};

// Requested integration step exceeds the resolution guard.
class step_size_error : public error {
public:
    using error::error;
};

// NaN/overflow or a diverging quantity during propagation.
class numerical_error : public error {
public:
    using error::error;
};

// Hierarchy (or sweep) would exceed the configured size cap.
class resource_error : public error {
public:
    using error::error;
};

} // namespace qcorr
