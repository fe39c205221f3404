// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nlg {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define NLG_DEFINE_ERROR(Name)                                                \
    struct Name : Error {                                                     \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}  \
    }

NLG_DEFINE_ERROR(DimensionMismatch);
NLG_DEFINE_ERROR(NotHermitian);
NLG_DEFINE_ERROR(NotPsd);
NLG_DEFINE_ERROR(NoConvergence);
NLG_DEFINE_ERROR(UnknownGame);
NLG_DEFINE_ERROR(BudgetExceeded);
NLG_DEFINE_ERROR(SolverFailure);
NLG_DEFINE_ERROR(ReducedStatesDiffer);
NLG_DEFINE_ERROR(WrongKey);
NLG_DEFINE_ERROR(UnsupportedCircuit);
NLG_DEFINE_ERROR(ProtocolViolation);
NLG_DEFINE_ERROR(DecodeFailure);
NLG_DEFINE_ERROR(NotWhiteBox);
NLG_DEFINE_ERROR(NotStronglyNonsignaling);
NLG_DEFINE_ERROR(NormExceeded);
NLG_DEFINE_ERROR(NotPowerOfTwo);
NLG_DEFINE_ERROR(EmptyList);
NLG_DEFINE_ERROR(ShapeMismatch);
NLG_DEFINE_ERROR(SchemaError);

#undef NLG_DEFINE_ERROR

}  // namespace nlg
